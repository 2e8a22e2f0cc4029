use super::PiecewisePoly;
use crate::exact::{Poly, Rat};
use crate::gates::SaGate;
use crate::partition::Partition;
use crate::{Error, Result};

impl PiecewisePoly {
    /// `x ↦ gate(g₁(x), …, g_k(x))` for a gate with all parameters bound.
    ///
    /// Each predicate is composed with the inputs and split where its sign
    /// class changes; the common refinement of those splits (and of the
    /// inputs) carries, per piece, the sum of the terms that fire there.
    pub fn apply_gate(gate: &SaGate, gs: &[&PiecewisePoly]) -> Result<PiecewisePoly> {
        if gs.len() != gate.arity() {
            return Err(Error::ArityMismatch { expected: gate.arity(), got: gs.len() });
        }
        if let Some(name) = gate.params().into_iter().next() {
            return Err(Error::UnboundVariable(name));
        }
        let (r, maps) = if gs.is_empty() {
            (Partition::whole(), Vec::new())
        } else {
            let parts: Vec<&Partition> = gs.iter().map(|g| &g.partition).collect();
            Partition::refine_with_maps(&parts)
        };
        let args: Vec<Vec<Poly>> =
            (0..r.len()).map(|b| gs.iter().enumerate().map(|(i, g)| g.polys[maps[i][b]].clone()).collect()).collect();

        let mut pred_polys: Vec<Vec<Poly>> = Vec::with_capacity(gate.preds().len());
        let mut splits = Vec::with_capacity(gate.preds().len());
        for q in gate.preds() {
            let polys = args.iter().map(|a| q.substitute_univariate(a)).collect::<Result<Vec<Poly>>>()?;
            let h = PiecewisePoly { partition: r.clone(), polys };
            splits.push(h.split_at(&Rat::zero(), false));
            pred_polys.push(h.polys);
        }
        let mut parts: Vec<&Partition> = splits.iter().map(|s| &s.partition).collect();
        parts.push(&r);
        let (b, bmaps) = Partition::refine_with_maps(&parts);
        let s = splits.len();

        // term compositions, computed once per piece of r; reuse predicate compositions when equal
        let same_as_pred: Vec<Option<usize>> =
            gate.terms().iter().map(|t| gate.preds().iter().position(|q| q == &t.poly)).collect();
        let mut cache: Vec<Vec<Option<Poly>>> = vec![vec![None; r.len()]; gate.terms().len()];
        let mut polys = Vec::with_capacity(b.len());
        let mut nonneg = vec![false; s];
        for bi in 0..b.len() {
            for i in 0..s {
                nonneg[i] = splits[i].above[bmaps[i][bi]];
            }
            let ri = bmaps[s][bi];
            let mut acc = Poly::zero();
            for (j, t) in gate.terms().iter().enumerate() {
                if !t.fires(&nonneg) {
                    continue;
                }
                if let Some(i) = same_as_pred[j] {
                    acc = &acc + &pred_polys[i][ri];
                    continue;
                }
                if cache[j][ri].is_none() {
                    cache[j][ri] = Some(t.poly.substitute_univariate(&args[ri])?);
                }
                acc = &acc + cache[j][ri].as_ref().unwrap();
            }
            polys.push(acc);
        }
        Ok(PiecewisePoly { partition: b, polys })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, AlgebraicReal, MPoly};
    use crate::gates::{encode_max, encode_relu, SaGate, Term};

    #[test]
    fn relu_of_identity() {
        let g = encode_relu(&[Rat::one()], &Rat::zero());
        let f = PiecewisePoly::apply_gate(&g, &[&PiecewisePoly::identity()]).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.eval_rat(&rat(-3, 1)), Rat::zero());
        assert_eq!(f.eval_rat(&rat(5, 1)), rat(5, 1));
    }

    #[test]
    fn triangle_second_layer() {
        let a = PiecewisePoly::relu(&Rat::one(), &Rat::zero());
        let b = PiecewisePoly::relu(&Rat::one(), &rat(-1, 2));
        let g = encode_relu(&[rat(2, 1), rat(-4, 1)], &Rat::zero());
        let f = PiecewisePoly::apply_gate(&g, &[&a, &b]).unwrap().simplify();
        assert_eq!(f.len(), 4);
        assert_eq!(f.to_string(), "(-inf, 0): 0\n[0, 1/2): 2x\n[1/2, 1]: -2x + 2\n(1, inf): 0");
        for (x, y) in [(rat(1, 2), rat(1, 1)), (rat(3, 4), rat(1, 2)), (rat(2, 1), Rat::zero())] {
            assert_eq!(f.eval_rat(&x), y);
        }
    }

    #[test]
    fn max_of_lines() {
        let g = encode_max(&["v1".parse().unwrap(), "v2".parse().unwrap()]).unwrap();
        let x = PiecewisePoly::identity();
        let y = PiecewisePoly::from_poly(Poly::from_ints(&[1, -1]));
        let f = PiecewisePoly::apply_gate(&g, &[&x, &y]).unwrap().simplify();
        assert_eq!(f.len(), 2);
        assert_eq!(f.eval_rat(&Rat::zero()), Rat::one());
        assert_eq!(f.eval_rat(&rat(1, 2)), rat(1, 2));
        assert_eq!(f.eval_rat(&Rat::one()), Rat::one());
    }

    #[test]
    fn quadratic_predicate_with_irrational_roots() {
        // 1[v1^2 - 2 >= 0] * 1
        let q: MPoly = "v1^2 - 2".parse().unwrap();
        let g = SaGate::new(1, vec![q], vec![Term::new(vec![], vec![0], MPoly::constant(Rat::one()))]).unwrap();
        let f = PiecewisePoly::apply_gate(&g, &[&PiecewisePoly::identity()]).unwrap();
        assert_eq!(f.len(), 3);
        let sqrt2 = AlgebraicReal::root_in(&Poly::from_ints(&[-2, 0, 1]), &rat(1, 1), &rat(2, 1)).unwrap();
        assert_eq!(f.eval(&sqrt2), AlgebraicReal::from(Rat::one()));
        assert_eq!(f.eval_rat(&rat(7, 5)), Rat::zero());
        assert_eq!(f.crossing_number(), 3);
    }

    #[test]
    fn unbound_and_arity_errors() {
        let g = SaGate::new(1, vec!["w*v1".parse().unwrap()], vec![]).unwrap();
        assert_eq!(
            PiecewisePoly::apply_gate(&g, &[&PiecewisePoly::identity()]).unwrap_err(),
            Error::UnboundVariable("w".into())
        );
        let r = encode_relu(&[Rat::one()], &Rat::zero());
        assert!(PiecewisePoly::apply_gate(&r, &[]).is_err());
    }
}
