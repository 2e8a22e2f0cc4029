//! Triangle-wave networks, their iterates, the hard network and the
//! signal-repetition operator.

mod certify;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::exact::{rat, MPoly, Poly, Rat};
use crate::gates::{GateSpec, Term};
use crate::network::{NetworkGraph, Node};
use crate::piecewise::PiecewisePoly;
use crate::{Error, Result};

pub use certify::{triangle_check, Rejected, TriangleCert};

fn named(pairs: &[(&str, Rat)]) -> BTreeMap<String, Rat> {
    pairs.iter().map(|(n, v)| (n.to_string(), v.clone())).collect()
}

fn triangle_params() -> BTreeMap<String, Rat> {
    named(&[("w", rat(1, 1)), ("b", rat(-1, 2)), ("c2", rat(2, 1)), ("c4", rat(-4, 1))])
}

/// The top node `σ(c2·u + c4·v)` of the ReLU triangle, reading layer `from`.
fn triangle_top(from: usize) -> Vec<Node> {
    vec![Node::new(GateSpec::relu(vec![MPoly::param("c2"), MPoly::param("c4")], MPoly::zero()), vec![(from, 0), (from, 1)])]
}

/// `σ(2σ(z) − 4σ(z − 1/2))` with the four shared parameters `w, b, c2, c4`.
pub fn triangle_relu() -> NetworkGraph {
    let bottom = vec![
        Node::new(GateSpec::relu(vec![MPoly::param("w")], MPoly::zero()), vec![(0, 0)]),
        Node::new(GateSpec::relu_named(&["w"], "b"), vec![(0, 0)]),
    ];
    NetworkGraph::new(1, triangle_params(), vec![bottom, triangle_top(1)]).expect("valid construction")
}

/// `min{σ(2z), σ(2 − 2z)}`.
pub fn triangle_min() -> NetworkGraph {
    let bottom = vec![
        Node::new(GateSpec::relu_rat(&[rat(2, 1)], &Rat::zero()), vec![(0, 0)]),
        Node::new(GateSpec::relu_rat(&[rat(-2, 1)], &rat(2, 1)), vec![(0, 0)]),
    ];
    let top = vec![Node::new(GateSpec::Min { ps: vec![MPoly::input(0), MPoly::input(1)] }, vec![(1, 0), (1, 1)])];
    NetworkGraph::new(1, BTreeMap::new(), vec![bottom, top]).expect("valid construction")
}

/// `4z(1 − z)` as a single polynomial node.
pub fn triangle_quad() -> NetworkGraph {
    let q: MPoly = "4*v1 - 4*v1^2".parse().expect("literal polynomial");
    let node = Node::new(GateSpec::Sa { preds: vec![], terms: vec![Term::new(vec![], vec![], q)] }, vec![(0, 0)]);
    NetworkGraph::new(1, BTreeMap::new(), vec![vec![node]]).expect("valid construction")
}

/// `outer ∘ inner` for a univariate `outer`: the layers of `outer` are
/// stacked on top and read `inner`'s output wherever they read the input.
pub fn stack(inner: &NetworkGraph, outer: &NetworkGraph) -> Result<NetworkGraph> {
    if outer.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: outer.dim() });
    }
    let mut params = inner.params().clone();
    for (name, v) in outer.params() {
        match params.get(name) {
            Some(old) if old != v => {
                return Err(Error::InvalidNetwork(format!("parameter `{name}` bound to both {old} and {v}")))
            }
            _ => {
                params.insert(name.clone(), v.clone());
            }
        }
    }
    let shift = inner.depth();
    let mut layers = inner.layers().to_vec();
    for layer in outer.layers() {
        layers.push(
            layer
                .iter()
                .map(|n| {
                    let parents = n.parents.iter().map(|&(pl, pi)| if pl == 0 { (shift, 0) } else { (pl + shift, pi) }).collect();
                    Node::new(n.gate.clone(), parents)
                })
                .collect(),
        );
    }
    NetworkGraph::new(inner.dim(), params, layers)
}

/// `k`-fold composition of a univariate network with itself; parameter
/// names stay shared, so the distinct-parameter count is unchanged.
pub fn iterate(net: &NetworkGraph, k: usize) -> Result<NetworkGraph> {
    if k < 1 {
        return Err(Error::InvalidArgument("iteration count must be at least 1".into()));
    }
    if net.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: net.dim() });
    }
    let mut out = net.clone();
    for _ in 1..k {
        out = stack(&out, net)?;
    }
    Ok(out)
}

/// `z = (i + ζ)·2^{1−k}` with integer `i ∈ {0, …, 2^{k−1}}` and `ζ ∈ [0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeIndex {
    pub i_k: u64,
    pub z_k: Rat,
}

pub fn shape_index(z: &Rat, k: u32) -> Result<ShapeIndex> {
    if k < 1 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if z.is_negative() || z > &Rat::one() {
        return Err(Error::InvalidArgument(format!("{z} is outside [0, 1]")));
    }
    let s = z * &Rat::from_int(2).pow(k as i32 - 1);
    let i = s.floor();
    let z_k = &s - &i;
    Ok(ShapeIndex { i_k: i.to_i64().expect("bounded by 2^(k-1)") as u64, z_k })
}

/// The value of the `k`-th iterate of the ReLU triangle at `z ∈ [0, 1]`,
/// from its index decomposition alone.
pub fn closed_form_fk(z: &Rat, k: u32) -> Result<Rat> {
    let ShapeIndex { z_k, .. } = shape_index(z, k)?;
    let two = Rat::from_int(2);
    Ok(if z_k <= Rat::new(1, 2) { &two * &z_k } else { two * (Rat::one() - z_k) })
}

/// The network `x ↦ f^{k³+4}(x₁)` on `ℝ^d`, `f` the ReLU triangle. Each copy
/// of `f` is two layers of three ReLU nodes; the first copy selects `x₁`
/// through the weights `sel1, …, seld`.
pub fn hard_network(k: usize, d: usize) -> Result<NetworkGraph> {
    if k < 1 || d < 1 {
        return Err(Error::InvalidArgument("k and d must be positive".into()));
    }
    let copies = k.checked_pow(3).and_then(|c| c.checked_add(4)).ok_or(Error::InvalidArgument("k too large".into()))?;
    let sel: Vec<String> = (1..=d).map(|i| format!("sel{i}")).collect();
    let mut params = triangle_params();
    for (i, s) in sel.iter().enumerate() {
        params.insert(s.clone(), if i == 0 { Rat::one() } else { Rat::zero() });
    }
    let a: Vec<MPoly> = sel.iter().map(|s| MPoly::param(s)).collect();
    let inputs: Vec<(usize, usize)> = (0..d).map(|i| (0, i)).collect();
    let first = vec![
        Node::new(GateSpec::relu(a.clone(), MPoly::zero()), inputs.clone()),
        Node::new(GateSpec::relu(a, MPoly::param("b")), inputs),
    ];
    let mut layers = vec![first, triangle_top(1)];
    for c in 1..copies {
        let below = 2 * c;
        layers.push(vec![
            Node::new(GateSpec::relu(vec![MPoly::param("w")], MPoly::zero()), vec![(below, 0)]),
            Node::new(GateSpec::relu_named(&["w"], "b"), vec![(below, 0)]),
        ]);
        layers.push(triangle_top(below + 1));
    }
    NetworkGraph::new(d, params, layers)
}

/// `g ∘ f^k` for a signal `g` with `g(z) = g(1 − z)` on `[0, 1]`: `2^k`
/// copies of `g`, each squeezed into an interval of width `2^{−k}`.
pub fn repeat_signal(g: &PiecewisePoly, k: usize) -> Result<PiecewisePoly> {
    let mirror = g.compose(&PiecewisePoly::from_poly(Poly::from_ints(&[1, -1])))?;
    if !g.same_on(&mirror, &Rat::zero(), &Rat::one()) {
        return Err(Error::Asymmetric);
    }
    if k == 0 {
        return Ok(g.clone());
    }
    let fk = iterate(&triangle_relu(), k)?.compile()?.output;
    g.compose(&fk)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples() -> Vec<Rat> {
        (0..=20).map(|i| rat(i, 20)).chain([rat(-1, 3), rat(7, 5), rat(1, 3), rat(2, 7)]).collect()
    }

    #[test]
    fn triangles_peak_at_half() {
        for net in [triangle_relu(), triangle_min(), triangle_quad()] {
            assert_eq!(net.eval(&[rat(1, 2)]).unwrap(), Rat::one());
            assert_eq!(net.eval(&[Rat::zero()]).unwrap(), Rat::zero());
            assert_eq!(net.eval(&[Rat::one()]).unwrap(), Rat::zero());
        }
        let (f, g) = (triangle_relu(), triangle_min());
        for z in samples() {
            assert_eq!(f.eval(std::slice::from_ref(&z)).unwrap(), g.eval(&[z]).unwrap());
        }
    }

    #[test]
    fn triangle_profiles() {
        let p = triangle_relu().profile();
        assert_eq!((p.l, p.max_width(), p.max_t(), p.max_alpha(), p.max_beta(), p.p), (2, 2, 1, 1, 1, 4));
        let p = triangle_min().profile();
        assert_eq!((p.l, p.max_width()), (2, 2));
        assert!(p.max_t() <= 2 && p.max_alpha() == 1 && p.max_beta() == 1);
        let p = triangle_quad().profile();
        assert_eq!((p.l, p.m, p.max_t(), p.max_alpha(), p.max_beta()), (1, 1, 0, 0, 2));
    }

    #[test]
    fn iterates() {
        let f = triangle_relu();
        assert_eq!(iterate(&f, 1).unwrap(), f);
        assert!(iterate(&f, 0).is_err());
        let f3 = iterate(&f, 3).unwrap();
        assert_eq!(f3.profile().p, 4);
        assert_eq!((f3.depth(), f3.node_count()), (6, 9));
        for z in samples() {
            let once = |x: Rat| f.eval(&[x]).unwrap();
            assert_eq!(f3.eval(std::slice::from_ref(&z)).unwrap(), once(once(once(z))));
        }
        for k in 1..=5 {
            let c = iterate(&f, k).unwrap().compile().unwrap().output;
            assert_eq!(c.crossing_number(), (1 << k) + 1);
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_fk(&Rat::zero(), 4).unwrap(), Rat::zero());
        assert_eq!(shape_index(&rat(1, 4), 2).unwrap(), ShapeIndex { i_k: 0, z_k: rat(1, 2) });
        assert_eq!(closed_form_fk(&rat(1, 4), 2).unwrap(), Rat::one());
        assert_eq!(shape_index(&rat(3, 8), 3).unwrap(), ShapeIndex { i_k: 1, z_k: rat(1, 2) });
        assert_eq!(closed_form_fk(&rat(3, 8), 3).unwrap(), Rat::one());
        assert!(closed_form_fk(&rat(3, 2), 1).is_err());
        assert_eq!(shape_index(&Rat::one(), 3).unwrap().i_k, 4);
    }

    #[test]
    fn hard_network_counts() {
        let h = hard_network(1, 1).unwrap();
        let p = h.profile();
        assert_eq!((p.l, p.m, p.p), (10, 15, 5));
        assert_eq!(h.eval(&[Rat::zero()]).unwrap(), Rat::zero());
        assert_eq!(hard_network(1, 3).unwrap().profile().p, 7);
        let p2 = hard_network(2, 1).unwrap().profile();
        assert_eq!((p2.l, p2.m), (2 * 8 + 8, 3 * 8 + 12));
    }

    #[test]
    fn repeat_signal_cases() {
        let half = PiecewisePoly::constant(rat(1, 2));
        assert!(repeat_signal(&half, 3).unwrap().same_on(&half, &Rat::zero(), &Rat::one()));
        let skew = PiecewisePoly::identity();
        assert_eq!(repeat_signal(&skew, 1).unwrap_err(), Error::Asymmetric);
        let bump = PiecewisePoly::from_poly(Poly::from_ints(&[0, 4, -4]));
        let h = repeat_signal(&bump, 2).unwrap();
        assert_eq!(h.eval_rat(&rat(1, 8)), Rat::one());
        for i in 0..=8 {
            let x = rat(i, 32);
            let g = bump.eval_rat(&(&x * &rat(4, 1)));
            for j in 0..4 {
                assert_eq!(h.eval_rat(&(&x + &rat(j, 4))), g, "x = {x}, shift {j}/4");
            }
        }
    }
}
