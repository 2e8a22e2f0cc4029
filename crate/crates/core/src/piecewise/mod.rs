//! Univariate piecewise polynomials over a [`Partition`] of ℝ: evaluation,
//! linear combinations, composition, gate application, classifiers,
//! crossing numbers and L¹ distances.

mod apply;
mod l1;
mod sign;

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exact::{isolate_roots, AlgebraicReal, MPoly, Poly, Rat};
use crate::partition::{Cut, CutKind, Interval, Partition};
use crate::{Error, Result};

pub use l1::{l1_distance, LinearL1};
pub use sign::{Classified, CrossingReport};

/// A function ℝ → ℝ given by one polynomial per piece of a partition.
///
/// Adjacent pieces are never merged implicitly; [`PiecewisePoly::simplify`]
/// does that on request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewisePoly {
    partition: Partition,
    polys: Vec<Poly>,
}

impl PiecewisePoly {
    pub fn new(partition: Partition, polys: Vec<Poly>) -> Result<PiecewisePoly> {
        if partition.len() != polys.len() {
            return Err(Error::LengthMismatch { expected: partition.len(), got: polys.len() });
        }
        Ok(PiecewisePoly { partition, polys })
    }

    /// Build from ascending `(interval, polynomial)` pairs tiling ℝ.
    pub fn from_pieces(pieces: Vec<(Interval, Poly)>) -> Result<PiecewisePoly> {
        let (ivs, polys): (Vec<Interval>, Vec<Poly>) = pieces.into_iter().unzip();
        PiecewisePoly::new(Partition::from_pieces(&ivs)?, polys)
    }

    pub fn from_poly(p: Poly) -> PiecewisePoly {
        PiecewisePoly { partition: Partition::whole(), polys: vec![p] }
    }

    pub fn constant(c: Rat) -> PiecewisePoly {
        PiecewisePoly::from_poly(Poly::constant(c))
    }

    pub fn zero() -> PiecewisePoly {
        PiecewisePoly::from_poly(Poly::zero())
    }

    pub fn identity() -> PiecewisePoly {
        PiecewisePoly::from_poly(Poly::x())
    }

    /// `max(0, a·x + b)`.
    pub fn relu(a: &Rat, b: &Rat) -> PiecewisePoly {
        let lin = Poly::linear(b.clone(), a.clone());
        if a.is_zero() {
            return PiecewisePoly::from_poly(if b.is_negative() { Poly::zero() } else { lin });
        }
        let root: AlgebraicReal = (-b / a).into();
        if a.is_positive() {
            PiecewisePoly { partition: Partition::from_sorted_cuts(vec![Cut::new(root, CutKind::Right)]), polys: vec![Poly::zero(), lin] }
        } else {
            PiecewisePoly { partition: Partition::from_sorted_cuts(vec![Cut::new(root, CutKind::Left)]), polys: vec![lin, Poly::zero()] }
        }
    }

    /// `value` on `[at, ∞)` and 0 before.
    pub fn step(at: &Rat, value: &Rat) -> PiecewisePoly {
        PiecewisePoly {
            partition: Partition::from_sorted_cuts(vec![Cut::new(at.into(), CutKind::Right)]),
            polys: vec![Poly::zero(), Poly::constant(value.clone())],
        }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest piece degree (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.polys.iter().map(Poly::degree_or_zero).max().unwrap_or(0)
    }

    /// The realized `(t, γ)`-poly profile: piece count and largest degree.
    pub fn profile(&self) -> (usize, usize) {
        (self.len(), self.degree())
    }

    pub fn pieces(&self) -> Vec<(Interval, &Poly)> {
        self.partition.pieces().into_iter().zip(&self.polys).collect()
    }

    pub fn eval(&self, x: &AlgebraicReal) -> AlgebraicReal {
        let p = &self.polys[self.partition.locate(x)];
        match x.as_rational() {
            Some(r) => p.eval(r).into(),
            None => x.eval_poly(p),
        }
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        self.polys[self.partition.locate_rat(x)].eval(x)
    }

    /// Pointwise `Σ cᵢ·fᵢ` over the common refinement.
    pub fn linear(coeffs: &[Rat], fs: &[&PiecewisePoly]) -> Result<PiecewisePoly> {
        if coeffs.len() != fs.len() {
            return Err(Error::LengthMismatch { expected: coeffs.len(), got: fs.len() });
        }
        if fs.is_empty() {
            return Err(Error::InvalidArgument("empty linear combination".into()));
        }
        let parts: Vec<&Partition> = fs.iter().map(|f| &f.partition).collect();
        let (partition, maps) = Partition::refine_with_maps(&parts);
        let polys = (0..partition.len())
            .map(|b| {
                let mut acc = Poly::zero();
                for (i, (c, f)) in coeffs.iter().zip(fs).enumerate() {
                    if !c.is_zero() {
                        acc = &acc + &f.polys[maps[i][b]].scale(c);
                    }
                }
                acc
            })
            .collect();
        Ok(PiecewisePoly { partition, polys })
    }

    pub fn scale(&self, c: &Rat) -> PiecewisePoly {
        PiecewisePoly { partition: self.partition.clone(), polys: self.polys.iter().map(|p| p.scale(c)).collect() }
    }

    /// `x ↦ F(g₁(x), …, g_k(x))` on the common refinement of the `gᵢ`.
    pub fn compose_poly(f: &MPoly, gs: &[&PiecewisePoly]) -> Result<PiecewisePoly> {
        if let Some(name) = f.params().into_iter().next() {
            return Err(Error::UnboundVariable(name));
        }
        if f.input_count() > gs.len() {
            return Err(Error::ArityMismatch { expected: f.input_count(), got: gs.len() });
        }
        if gs.is_empty() {
            return Ok(PiecewisePoly::from_poly(f.substitute_univariate(&[])?));
        }
        let parts: Vec<&Partition> = gs.iter().map(|g| &g.partition).collect();
        let (partition, maps) = Partition::refine_with_maps(&parts);
        let mut polys = Vec::with_capacity(partition.len());
        let mut args: Vec<Poly> = Vec::with_capacity(gs.len());
        for b in 0..partition.len() {
            args.clear();
            args.extend(gs.iter().enumerate().map(|(i, g)| g.polys[maps[i][b]].clone()));
            polys.push(f.substitute_univariate(&args)?);
        }
        Ok(PiecewisePoly { partition, polys })
    }

    /// Functional composition `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &PiecewisePoly) -> Result<PiecewisePoly> {
        let part = &inner.partition;
        let in_cuts = part.cuts();
        let mut cuts: Vec<Cut> = Vec::new();
        let mut polys: Vec<Poly> = Vec::new();
        let outer_at = |x: &AlgebraicReal, q: &Poly| self.polys[self.partition.locate(&x.eval_poly(q))].compose(q);
        for j in 0..=in_cuts.len() {
            let lo = j.checked_sub(1).map(|i| &in_cuts[i].at);
            let hi = in_cuts.get(j).map(|c| &c.at);
            let q = &inner.polys[part.open_piece(j)];
            // points inside the open piece where q lands on a cut of self
            let mut pts: Vec<AlgebraicReal> = Vec::new();
            if !q.is_constant() {
                for c in self.partition.cuts() {
                    let eq = match c.at.as_rational() {
                        Some(r) => q - &Poly::constant(r.clone()),
                        None => c.at.defining_poly().unwrap().compose(q),
                    };
                    for x in roots_inside(&eq, lo, hi)? {
                        if c.at.is_rational() || x.eval_poly(q) == c.at {
                            pts.push(x);
                        }
                    }
                }
                pts.sort();
                pts.dedup();
            }
            let mut from = lo;
            for x in pts.iter().map(Some).chain(std::iter::once(None)) {
                let s = sample_between(from, x.or(hi));
                polys.push(self.polys[self.partition.locate_rat(&q.eval(&s))].compose(q));
                if let Some(x) = x {
                    cuts.push(Cut::new(x.clone(), CutKind::Singleton));
                    polys.push(outer_at(x, q));
                    from = Some(x);
                }
            }
            // every inner cut becomes a singleton; simplify() restores closedness
            if let Some(c) = in_cuts.get(j) {
                cuts.push(Cut::new(c.at.clone(), CutKind::Singleton));
                polys.push(outer_at(&c.at, &inner.polys[part.point_piece(j)]));
            }
        }
        Ok(PiecewisePoly { partition: Partition::from_sorted_cuts(cuts), polys }.simplify())
    }

    /// Merge neighbouring pieces that carry the same polynomial, and attach
    /// singleton pieces to a neighbour taking the same value there.
    pub fn simplify(&self) -> PiecewisePoly {
        let cuts = self.partition.cuts();
        let mut out_cuts: Vec<Cut> = Vec::with_capacity(cuts.len());
        let mut out_polys: Vec<Poly> = vec![self.polys[0].clone()];
        let mut idx = 0;
        for c in cuts {
            let before = out_polys.last().unwrap().clone();
            match c.kind {
                CutKind::Singleton => {
                    let (pt, after) = (&self.polys[idx + 1], &self.polys[idx + 2]);
                    idx += 2;
                    let same_before = agree_at(&c.at, &before, pt);
                    if same_before && &before == after {
                        continue;
                    }
                    if same_before {
                        out_cuts.push(Cut::new(c.at.clone(), CutKind::Left));
                    } else if agree_at(&c.at, after, pt) {
                        out_cuts.push(Cut::new(c.at.clone(), CutKind::Right));
                    } else {
                        out_cuts.push(c.clone());
                        out_polys.push(pt.clone());
                    }
                    out_polys.push(after.clone());
                }
                CutKind::Left | CutKind::Right => {
                    let after = &self.polys[idx + 1];
                    idx += 1;
                    if &before == after {
                        continue;
                    }
                    out_cuts.push(c.clone());
                    out_polys.push(after.clone());
                }
            }
        }
        PiecewisePoly { partition: Partition::from_sorted_cuts(out_cuts), polys: out_polys }
    }

    /// Whether both functions agree at every point of ℝ.
    pub fn same_function(&self, other: &PiecewisePoly) -> bool {
        let (b, maps) = Partition::refine_with_maps(&[&self.partition, &other.partition]);
        b.pieces().iter().enumerate().all(|(i, iv)| {
            let (p, q) = (&self.polys[maps[0][i]], &other.polys[maps[1][i]]);
            if iv.is_singleton() {
                agree_at(iv.lo.as_ref().unwrap(), p, q)
            } else {
                p == q
            }
        })
    }

    /// Whether both functions agree at every point of `[lo, hi]`.
    pub fn same_on(&self, other: &PiecewisePoly, lo: &Rat, hi: &Rat) -> bool {
        let window = if lo == hi {
            Partition::from_sorted_cuts(vec![Cut::new(lo.clone().into(), CutKind::Singleton)])
        } else {
            Partition::from_sorted_cuts(vec![
                Cut::new(lo.clone().into(), CutKind::Right),
                Cut::new(hi.clone().into(), CutKind::Left),
            ])
        };
        let (b, maps) = Partition::refine_with_maps(&[&self.partition, &other.partition, &window]);
        b.pieces().iter().enumerate().filter(|(i, _)| maps[2][*i] == 1).all(|(i, iv)| {
            let (p, q) = (&self.polys[maps[0][i]], &other.polys[maps[1][i]]);
            if iv.is_singleton() {
                agree_at(iv.lo.as_ref().unwrap(), p, q)
            } else {
                p == q
            }
        })
    }
}

fn agree_at(x: &AlgebraicReal, p: &Poly, q: &Poly) -> bool {
    p == q || x.sign_of_poly(&(p - q)) == 0
}

/// Roots of `q` strictly between `lo` and `hi` (`None` is unbounded).
pub(crate) fn roots_inside(q: &Poly, lo: Option<&AlgebraicReal>, hi: Option<&AlgebraicReal>) -> Result<Vec<AlgebraicReal>> {
    if q.is_constant() {
        return Ok(Vec::new());
    }
    let wlo = lo.map(|a| a.enclosure().0);
    let whi = hi.map(|b| b.enclosure().1);
    let roots = isolate_roots(q, wlo.as_ref(), whi.as_ref())?;
    Ok(roots
        .into_iter()
        .filter(|r| lo.is_none_or(|a| r > a) && hi.is_none_or(|b| r < b))
        .collect())
}

/// A rational strictly between `lo < hi` (`None` is unbounded).
pub(crate) fn sample_between(lo: Option<&AlgebraicReal>, hi: Option<&AlgebraicReal>) -> Rat {
    match (lo, hi) {
        (Some(a), Some(b)) => AlgebraicReal::rational_between(a, b),
        (Some(a), None) => a.enclosure().1.floor() + Rat::one(),
        (None, Some(b)) => b.enclosure().0.ceil() - Rat::one(),
        (None, None) => Rat::zero(),
    }
}

impl fmt::Display for PiecewisePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (iv, p)) in self.pieces().into_iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{iv}: {p}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PwpRepr {
    pieces: Vec<Interval>,
    polys: Vec<Poly>,
}

impl Serialize for PiecewisePoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PwpRepr { pieces: self.partition.pieces(), polys: self.polys.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PiecewisePoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<PiecewisePoly, D::Error> {
        let r = PwpRepr::deserialize(deserializer)?;
        let partition = Partition::from_pieces(&r.pieces).map_err(D::Error::custom)?;
        PiecewisePoly::new(partition, r.polys).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn tent() -> PiecewisePoly {
        let a = PiecewisePoly::relu(&rat(2, 1), &Rat::zero());
        let b = PiecewisePoly::relu(&rat(4, 1), &rat(-2, 1));
        let c = PiecewisePoly::relu(&rat(2, 1), &rat(-2, 1));
        PiecewisePoly::linear(&[Rat::one(), -Rat::one(), Rat::one()], &[&a, &b, &c]).unwrap().simplify()
    }

    #[test]
    fn relu_evaluation() {
        let r = PiecewisePoly::relu(&Rat::one(), &Rat::zero());
        assert_eq!(r.eval_rat(&rat(-3, 1)), Rat::zero());
        assert_eq!(r.eval_rat(&rat(5, 1)), rat(5, 1));
        assert_eq!(tent().eval_rat(&rat(1, 2)), Rat::one());
        assert_eq!(tent().len(), 4);
    }

    #[test]
    fn linear_combinations() {
        let f = tent();
        let same = PiecewisePoly::linear(&[Rat::one()], &[&f]).unwrap();
        assert!(same.same_function(&f));
        let zero = PiecewisePoly::linear(&[Rat::one(), -Rat::one()], &[&f, &f]).unwrap();
        assert!(zero.same_function(&PiecewisePoly::zero()));
        assert_eq!(zero.simplify().len(), 1);
        let s = PiecewisePoly::linear(
            &[rat(2, 1), Rat::one()],
            &[&PiecewisePoly::step(&Rat::zero(), &Rat::one()), &PiecewisePoly::step(&Rat::one(), &Rat::one())],
        )
        .unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.eval_rat(&rat(-1, 1)), Rat::zero());
        assert_eq!(s.eval_rat(&rat(1, 2)), rat(2, 1));
        assert_eq!(s.eval_rat(&rat(2, 1)), rat(3, 1));
        assert!(PiecewisePoly::linear(&[Rat::one()], &[]).is_err());
    }

    #[test]
    fn polynomial_composition() {
        let f = tent();
        let id = PiecewisePoly::compose_poly(&"v1".parse().unwrap(), &[&f]).unwrap();
        assert!(id.same_function(&f));
        let r1 = PiecewisePoly::relu(&Rat::one(), &Rat::zero());
        let r2 = PiecewisePoly::relu(&-Rat::one(), &Rat::zero());
        let abs = PiecewisePoly::compose_poly(&"v1 + v2".parse().unwrap(), &[&r1, &r2]).unwrap();
        assert!(abs.len() <= 4);
        assert_eq!(abs.simplify().len(), 2);
        for x in [-1, 0, 1] {
            assert_eq!(abs.eval_rat(&rat(x, 1)), rat(x.abs(), 1));
        }
        let prod = PiecewisePoly::compose_poly(&"v1*v2".parse().unwrap(), &[&r1, &PiecewisePoly::relu(&Rat::one(), &-Rat::one())])
            .unwrap();
        assert!(prod.len() <= 4 && prod.degree() <= 2);
        assert_eq!(prod.eval_rat(&rat(3, 1)), rat(6, 1));
        assert!(matches!(
            PiecewisePoly::compose_poly(&"w*v1".parse().unwrap(), &[&f]),
            Err(Error::UnboundVariable(_))
        ));
    }

    #[test]
    fn classifier_and_crossings() {
        let half = PiecewisePoly::constant(rat(1, 2));
        assert!(half.classifier().same_function(&PiecewisePoly::constant(Rat::one())));
        assert_eq!(half.crossing_number(), 1);
        assert_eq!(PiecewisePoly::zero().crossing_number(), 1);
        assert_eq!(PiecewisePoly::relu(&Rat::one(), &Rat::zero()).crossing_number(), 2);
        let c = tent().classifier();
        assert_eq!(c.to_string(), "(-inf, 1/4): 0\n[1/4, 3/4]: 1\n(3/4, inf): 0");
        assert_eq!(c.classifier(), c);
        let r = tent().disagreement(&tent());
        assert_eq!((r.s_f, r.s_g, r.disagree), (3, 3, 0));
        let r = tent().disagreement(&PiecewisePoly::zero());
        assert_eq!((r.s_f, r.s_g, r.disagree), (3, 1, 1));
        assert!(r.satisfies_bound());
    }

    #[test]
    fn functional_composition() {
        let f = tent();
        let ff = f.compose(&f).unwrap();
        assert_eq!(ff.crossing_number(), 5);
        for (x, y) in [(rat(1, 4), rat(1, 1)), (rat(1, 2), Rat::zero()), (rat(3, 8), rat(1, 2))] {
            assert_eq!(ff.eval_rat(&x), y);
        }
        // composing with an irrational breakpoint: x^2 - 2 hits the tent's cuts at algebraic points
        let q = PiecewisePoly::from_poly(Poly::from_ints(&[0, 0, 1]));
        let fq = f.compose(&q).unwrap();
        for x in [rat(-3, 2), rat(-1, 2), rat(1, 3), rat(7, 10), rat(1, 1), rat(2, 1)] {
            assert_eq!(fq.eval_rat(&x), f.eval_rat(&(&x * &x)));
        }
    }

    #[test]
    fn serde_round_trip() {
        let f = tent();
        let json = serde_json::to_string(&f).unwrap();
        assert!(json.contains("\"pieces\"") && json.contains("\"polys\""));
        let back: PiecewisePoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }
}
