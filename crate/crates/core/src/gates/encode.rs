use serde::{Deserialize, Serialize};

use super::{SaGate, Term};
use crate::exact::{MPoly, Rat};
use crate::partition::CutKind;
use crate::piecewise::PiecewisePoly;
use crate::{Error, Result};

/// Arity implied by the inputs a set of polynomials mentions.
fn arity_of<'a>(ps: impl IntoIterator<Item = &'a MPoly>) -> usize {
    ps.into_iter().map(MPoly::input_count).max().unwrap_or(0)
}

/// `max(0, q(v))` as a gate with the single predicate `q`.
pub(crate) fn relu_of(q: MPoly) -> SaGate {
    let arity = q.input_count();
    SaGate { arity, preds: vec![q.clone()], terms: vec![Term::new(vec![], vec![0], q)] }
}

/// `v ↦ max(0, ⟨a, v⟩ + b)`.
pub fn encode_relu(a: &[Rat], b: &Rat) -> SaGate {
    let mut g = relu_of(MPoly::affine(a, b));
    g.arity = a.len();
    g
}

/// `σ ∘ q` for a piecewise-polynomial activation `σ` with rational breakpoints.
///
/// Each breakpoint `b` contributes `q − b` (or `b − q` when the point closes
/// the piece on its left, both for a singleton piece), and each piece of `σ`
/// one term `σᵢ ∘ q` gated by the two neighbouring breakpoints.
pub fn encode_poly_activation(sigma: &PiecewisePoly, q: &MPoly) -> Result<SaGate> {
    let cuts = sigma.partition().cuts();
    let mut preds = Vec::new();
    // per cut: (conditions for the piece on its left, for the point, for the piece on its right)
    type Cond = (Vec<usize>, Vec<usize>);
    let mut around: Vec<(Cond, Cond, Cond)> = Vec::new();
    for c in cuts {
        let b = c.at.as_rational().ok_or_else(|| {
            Error::InvalidArgument(format!("activation breakpoint {} is not rational", c.at))
        })?;
        let bc = MPoly::constant(b.clone());
        let below = q - &bc;
        let above = &bc - q;
        let conds = match c.kind {
            CutKind::Right => {
                preds.push(below);
                let i = preds.len() - 1;
                ((vec![i], vec![]), (vec![], vec![i]), (vec![], vec![i]))
            }
            CutKind::Left => {
                preds.push(above);
                let i = preds.len() - 1;
                ((vec![], vec![i]), (vec![], vec![i]), (vec![i], vec![]))
            }
            CutKind::Singleton => {
                preds.push(below);
                preds.push(above);
                let (i, j) = (preds.len() - 2, preds.len() - 1);
                ((vec![i], vec![]), (vec![], vec![i, j]), (vec![j], vec![]))
            }
        };
        around.push(conds);
    }
    let mut terms = Vec::new();
    let polys = sigma.polys();
    let mut piece = 0;
    for j in 0..=cuts.len() {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        if j > 0 {
            lower.extend(&around[j - 1].2 .0);
            upper.extend(&around[j - 1].2 .1);
        }
        if j < cuts.len() {
            lower.extend(&around[j].0 .0);
            upper.extend(&around[j].0 .1);
        }
        // a Left/Right boundary point is already covered by one of its neighbours
        terms.push(Term::new(lower, upper, q.compose_into(&polys[piece])));
        piece += 1;
        if j < cuts.len() && cuts[j].kind == CutKind::Singleton {
            let (l, u) = around[j].1.clone();
            terms.push(Term::new(l, u, q.compose_into(&polys[piece])));
            piece += 1;
        }
    }
    SaGate::new(q.input_count(), preds, terms)
}

/// `max_i pᵢ`: term i fires when `pᵢ` strictly beats every earlier
/// polynomial and ties or beats every later one, so ties go to the first.
pub fn encode_max(ps: &[MPoly]) -> Result<SaGate> {
    if ps.is_empty() {
        return Err(Error::InvalidArgument("max of an empty list".into()));
    }
    let r = ps.len();
    let mut preds = Vec::with_capacity(r * (r - 1));
    let mut terms = Vec::with_capacity(r);
    for i in 0..r {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for j in 0..r {
            if j < i {
                preds.push(&ps[j] - &ps[i]);
                lower.push(preds.len() - 1);
            } else if j > i {
                preds.push(&ps[i] - &ps[j]);
                upper.push(preds.len() - 1);
            }
        }
        terms.push(Term::new(lower, upper, ps[i].clone()));
    }
    SaGate::new(arity_of(ps), preds, terms)
}

/// `min_i pᵢ = −max_i(−pᵢ)`.
pub fn encode_min(ps: &[MPoly]) -> Result<SaGate> {
    let neg: Vec<MPoly> = ps.iter().map(|p| -p).collect();
    Ok(encode_max(&neg)?.scaled(&-Rat::one()))
}

/// A decision tree whose internal nodes test `⟨a, x⟩ − b ≥ 0` and go right
/// when it holds, left otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecisionTree {
    Leaf { leaf: Rat },
    Split { a: Vec<Rat>, b: Rat, left: Box<DecisionTree>, right: Box<DecisionTree> },
}

impl DecisionTree {
    pub fn leaf(value: Rat) -> DecisionTree {
        DecisionTree::Leaf { leaf: value }
    }

    pub fn split(a: Vec<Rat>, b: Rat, left: DecisionTree, right: DecisionTree) -> DecisionTree {
        DecisionTree::Split { a, b, left: Box::new(left), right: Box::new(right) }
    }

    /// A one-split tree on the first coordinate: `lo` below `threshold`, `hi` from it on.
    pub fn stump(threshold: Rat, lo: Rat, hi: Rat) -> DecisionTree {
        DecisionTree::split(vec![Rat::one()], threshold, DecisionTree::leaf(lo), DecisionTree::leaf(hi))
    }

    /// Total node count, leaves included.
    pub fn node_count(&self) -> usize {
        match self {
            DecisionTree::Leaf { .. } => 1,
            DecisionTree::Split { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }

    /// Number of coordinates the tree reads.
    pub fn dim(&self) -> usize {
        match self {
            DecisionTree::Leaf { .. } => 0,
            DecisionTree::Split { a, left, right, .. } => a.len().max(left.dim()).max(right.dim()),
        }
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        match self {
            DecisionTree::Leaf { leaf } => leaf.clone(),
            DecisionTree::Split { a, b, left, right } => {
                let s: Rat = a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<Rat>() - b;
                if s.is_negative() {
                    left.eval(x)
                } else {
                    right.eval(x)
                }
            }
        }
    }
}

/// Weighted sum `Σ cᵢ·gᵢ` of decision trees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoostedTrees {
    pub weights: Vec<Rat>,
    pub trees: Vec<DecisionTree>,
}

impl BoostedTrees {
    pub fn new(weights: Vec<Rat>, trees: Vec<DecisionTree>) -> Result<BoostedTrees> {
        if weights.len() != trees.len() {
            return Err(Error::LengthMismatch { expected: weights.len(), got: trees.len() });
        }
        Ok(BoostedTrees { weights, trees })
    }

    /// Largest node count of a single tree.
    pub fn max_nodes(&self) -> usize {
        self.trees.iter().map(DecisionTree::node_count).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        self.weights.iter().zip(&self.trees).map(|(c, t)| c * &t.eval(x)).sum()
    }
}

fn collect_dt(tree: &DecisionTree, lower: &mut Vec<usize>, upper: &mut Vec<usize>, preds: &mut Vec<MPoly>, terms: &mut Vec<Term>) {
    match tree {
        DecisionTree::Leaf { leaf } => terms.push(Term::new(lower.clone(), upper.clone(), MPoly::constant(leaf.clone()))),
        DecisionTree::Split { a, b, left, right } => {
            preds.push(MPoly::affine(a, &-b));
            let i = preds.len() - 1;
            lower.push(i);
            collect_dt(left, lower, upper, preds, terms);
            lower.pop();
            upper.push(i);
            collect_dt(right, lower, upper, preds, terms);
            upper.pop();
        }
    }
}

/// One predicate per internal node and one constant term per leaf, gated by
/// the signs along the root-to-leaf path.
pub fn encode_dt(tree: &DecisionTree) -> SaGate {
    let mut preds = Vec::new();
    let mut terms = Vec::new();
    collect_dt(tree, &mut Vec::new(), &mut Vec::new(), &mut preds, &mut terms);
    SaGate { arity: tree.dim(), preds, terms }
}

/// The union of the encoded trees with terms scaled by the weights.
pub fn encode_bdt(bdt: &BoostedTrees) -> SaGate {
    let mut preds = Vec::new();
    let mut terms = Vec::new();
    for (c, tree) in bdt.weights.iter().zip(&bdt.trees) {
        let g = encode_dt(tree);
        let off = preds.len();
        preds.extend(g.preds);
        terms.extend(g.terms.into_iter().map(|t| Term {
            lower: t.lower.iter().map(|i| i + off).collect(),
            upper: t.upper.iter().map(|i| i + off).collect(),
            poly: t.poly.scale(c),
        }));
    }
    let arity = bdt.trees.iter().map(DecisionTree::dim).max().unwrap_or(0);
    SaGate { arity, preds, terms }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::exact::{rat, Poly};
    use crate::partition::{Cut, Partition};

    fn ev(g: &SaGate, v: &[Rat]) -> Rat {
        g.eval(v, &BTreeMap::new()).unwrap()
    }

    fn mp(s: &str) -> MPoly {
        s.parse().unwrap()
    }

    #[test]
    fn relu_encoding() {
        let g = encode_relu(&[rat(1, 1)], &Rat::zero());
        assert_eq!(ev(&g, &[rat(-2, 1)]), Rat::zero());
        assert_eq!(ev(&g, &[rat(3, 1)]), rat(3, 1));
        assert_eq!(g.profile(), super::super::SaProfile { t: 1, alpha: 1, beta: 1, m: 1 });
        let inner = encode_relu(&[rat(2, 1), rat(-4, 1)], &Rat::zero());
        assert_eq!(ev(&inner, &[rat(1, 2), Rat::zero()]), Rat::one());
    }

    #[test]
    fn activation_encodings() {
        let relu = PiecewisePoly::relu(&Rat::one(), &Rat::zero());
        let g = encode_poly_activation(&relu, &mp("v1")).unwrap();
        assert_eq!(g.profile(), super::super::SaProfile { t: 1, alpha: 1, beta: 1, m: 2 });
        for x in [-3, 0, 2] {
            assert_eq!(ev(&g, &[rat(x, 1)]), rat(x.max(0), 1));
        }
        let id = encode_poly_activation(&PiecewisePoly::identity(), &mp("v1^2 - v1")).unwrap();
        let p = id.profile();
        assert_eq!((p.t, p.alpha, p.beta), (0, 0, 2));
        assert!(p.fits_within(&super::super::SaProfile::new(1, 2, 2)));
        assert_eq!(ev(&id, &[rat(3, 1)]), rat(6, 1));
        // clamp to [0, 1]
        let clamp = PiecewisePoly::new(
            Partition::from_cuts(vec![Cut::new(rat(0, 1).into(), CutKind::Right), Cut::new(rat(1, 1).into(), CutKind::Right)])
                .unwrap(),
            vec![Poly::zero(), Poly::x(), Poly::one()],
        )
        .unwrap();
        let g = encode_poly_activation(&clamp, &mp("v1")).unwrap();
        assert!(g.profile().fits_within(&super::super::SaProfile::new(3, 1, 1)));
        assert_eq!(ev(&g, &[rat(-1, 1)]), Rat::zero());
        assert_eq!(ev(&g, &[rat(1, 2)]), rat(1, 2));
        assert_eq!(ev(&g, &[rat(2, 1)]), Rat::one());
    }

    #[test]
    fn singleton_activation_piece() {
        // 0 except the value 5 exactly at 1
        let sigma = PiecewisePoly::new(
            Partition::from_cuts(vec![Cut::new(rat(1, 1).into(), CutKind::Singleton)]).unwrap(),
            vec![Poly::zero(), Poly::constant(rat(5, 1)), Poly::zero()],
        )
        .unwrap();
        let g = encode_poly_activation(&sigma, &mp("v1")).unwrap();
        assert_eq!(ev(&g, &[rat(1, 1)]), rat(5, 1));
        assert_eq!(ev(&g, &[rat(1, 2)]), Rat::zero());
        assert_eq!(ev(&g, &[rat(3, 2)]), Rat::zero());
    }

    #[test]
    fn max_and_min() {
        let one = encode_max(&[mp("v1^2")]).unwrap();
        assert_eq!(one.preds().len(), 0);
        assert_eq!(ev(&one, &[rat(3, 1)]), rat(9, 1));
        let m = encode_max(&[mp("v1"), mp("v2")]).unwrap();
        assert_eq!(m.preds().len(), 2);
        assert_eq!(ev(&m, &[rat(3, 1), rat(5, 1)]), rat(5, 1));
        assert_eq!(ev(&m, &[rat(4, 1), rat(4, 1)]), rat(4, 1));
        let g = encode_min(&[mp("2*v1"), mp("2 - 2*v1")]).unwrap();
        assert_eq!(ev(&g, &[rat(1, 2)]), Rat::one());
        assert_eq!(ev(&g, &[rat(1, 4)]), rat(1, 2));
        assert!(encode_max(&[]).is_err());
    }

    #[test]
    fn trees() {
        assert_eq!(ev(&encode_dt(&DecisionTree::leaf(rat(7, 1))), &[]), rat(7, 1));
        let stump = DecisionTree::stump(Rat::zero(), Rat::zero(), Rat::one());
        let g = encode_dt(&stump);
        let p = g.profile();
        assert_eq!(stump.node_count(), 3);
        assert!(p.fits_within(&super::super::SaProfile::new(3, 1, 0)));
        assert_eq!(ev(&g, &[rat(-1, 1)]), Rat::zero());
        assert_eq!(ev(&g, &[rat(0, 1)]), Rat::one());
        assert_eq!(ev(&g, &[rat(1, 1)]), Rat::one());
        let b = BoostedTrees::new(
            vec![rat(2, 1), rat(1, 1)],
            vec![stump, DecisionTree::stump(Rat::one(), Rat::zero(), Rat::one())],
        )
        .unwrap();
        let g = encode_bdt(&b);
        assert!(g.profile().fits_within(&super::super::SaProfile::new(6, 1, 0)));
        for (x, want) in [(rat(-1, 1), 0), (rat(1, 2), 2), (rat(2, 1), 3)] {
            assert_eq!(ev(&g, std::slice::from_ref(&x)), rat(want, 1));
            assert_eq!(b.eval(&[x]), rat(want, 1));
        }
    }
}
