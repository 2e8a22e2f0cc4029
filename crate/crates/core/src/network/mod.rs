//! Layered networks of semi-algebraic gates.
//!
//! Layer 0 is the input itself: node `(0, i)` is the coordinate `xᵢ`.
//! Every other node applies a gate to parents from strictly earlier layers,
//! and the single node of the last layer is the output.

mod compile;
mod format;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::exact::{MPoly, Rat, Var};
use crate::gates::{GateSpec, SaGate};
use crate::{Error, Result};

pub use compile::{bdt_crossing_bound, crossing_bound, dt_crossing_bound, layered_bound, Compiled, CrossingBounds, LayerTrace};
pub use format::{parse_net, serialize_net};

/// A gate together with the nodes feeding it, as `(layer, index)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub gate: GateSpec,
    pub parents: Vec<(usize, usize)>,
}

impl Node {
    pub fn new(gate: GateSpec, parents: Vec<(usize, usize)>) -> Node {
        Node { gate, parents }
    }
}

/// A validated network. `layers[0]` holds the nodes of layer 1.
#[derive(Clone, Debug)]
pub struct NetworkGraph {
    dim: usize,
    params: BTreeMap<String, Rat>,
    layers: Vec<Vec<Node>>,
    gates: Vec<Vec<SaGate>>,
}

impl PartialEq for NetworkGraph {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.params == other.params && self.layers == other.layers
    }
}

/// Per-layer counts: node count, the largest realized `(t, α, β)` and the
/// largest fan-in (all input coordinates together count as one parent).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerProfile {
    pub m: usize,
    pub t: usize,
    pub alpha: usize,
    pub beta: usize,
    pub fan_in: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetProfile {
    pub dim: usize,
    /// Layers, not counting layer 0.
    pub l: usize,
    /// Total node count.
    pub m: usize,
    pub layers: Vec<LayerProfile>,
    /// Distinct parameters.
    pub p: usize,
    /// Every parent sits in the layer just below its node.
    pub strict: bool,
}

impl NetProfile {
    pub fn max_t(&self) -> usize {
        self.layers.iter().map(|l| l.t).max().unwrap_or(0)
    }

    pub fn max_alpha(&self) -> usize {
        self.layers.iter().map(|l| l.alpha).max().unwrap_or(0)
    }

    pub fn max_beta(&self) -> usize {
        self.layers.iter().map(|l| l.beta).max().unwrap_or(0)
    }

    pub fn max_width(&self) -> usize {
        self.layers.iter().map(|l| l.m).max().unwrap_or(0)
    }
}

/// The affine map `z ↦ a·z + b` from ℝ into the input space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineMap {
    pub a: Vec<Rat>,
    pub b: Vec<Rat>,
}

impl LineMap {
    pub fn new(a: Vec<Rat>, b: Vec<Rat>) -> Result<LineMap> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch { expected: a.len(), got: b.len() });
        }
        Ok(LineMap { a, b })
    }

    /// `z ↦ (z, y₁, …, y_{d−1})`.
    pub fn axis(y: &[Rat]) -> LineMap {
        let mut a = vec![Rat::zero(); y.len() + 1];
        a[0] = Rat::one();
        let mut b = vec![Rat::zero()];
        b.extend_from_slice(y);
        LineMap { a, b }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn at(&self, z: &Rat) -> Vec<Rat> {
        self.a.iter().zip(&self.b).map(|(a, b)| a * z + b).collect()
    }
}

impl std::str::FromStr for LineMap {
    type Err = Error;

    /// `"a1,a2,…;b1,b2,…"`.
    fn from_str(s: &str) -> Result<LineMap> {
        let (a, b) = s.split_once(';').ok_or_else(|| Error::Parse(format!("expected `a;b`, got `{s}`")))?;
        let list = |t: &str| t.split(',').map(|x| x.trim().parse::<Rat>()).collect::<Result<Vec<_>>>();
        LineMap::new(list(a)?, list(b)?)
    }
}

impl NetworkGraph {
    pub fn new(dim: usize, params: BTreeMap<String, Rat>, layers: Vec<Vec<Node>>) -> Result<NetworkGraph> {
        let bad = |msg: String| Err(Error::InvalidNetwork(msg));
        if dim == 0 {
            return bad("input dimension must be positive".into());
        }
        match layers.last() {
            None => return bad("no layers".into()),
            Some(last) if last.len() != 1 => return bad(format!("last layer has {} nodes, expected 1", last.len())),
            _ => {}
        }
        let mut gates = Vec::with_capacity(layers.len());
        for (li, layer) in layers.iter().enumerate() {
            let here = li + 1;
            if layer.is_empty() {
                return bad(format!("layer {here} is empty"));
            }
            let mut row = Vec::with_capacity(layer.len());
            for (ni, node) in layer.iter().enumerate() {
                for &(pl, pi) in &node.parents {
                    let width = if pl == 0 { dim } else if pl < here { layers[pl - 1].len() } else { 0 };
                    if pl >= here || pi >= width {
                        return bad(format!("layer {here}, node {ni}: parent ({pl}, {pi}) does not exist below it"));
                    }
                }
                let gate = node
                    .gate
                    .to_gate(node.parents.len())
                    .map_err(|e| Error::InvalidNetwork(format!("layer {here}, node {ni}: {e}")))?;
                row.push(gate);
            }
            gates.push(row);
        }
        Ok(NetworkGraph { dim, params, layers, gates })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &BTreeMap<String, Rat> {
        &self.params
    }

    /// Layers 1..=l.
    pub fn layers(&self) -> &[Vec<Node>] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn node_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Encoded gate of node `index` in layer `layer ≥ 1`.
    pub fn gate(&self, layer: usize, index: usize) -> &SaGate {
        &self.gates[layer - 1][index]
    }

    /// Same graph, different parameter values.
    pub fn with_params(&self, params: BTreeMap<String, Rat>) -> NetworkGraph {
        NetworkGraph { params, ..self.clone() }
    }

    /// Parameter names referenced by some gate.
    pub fn used_params(&self) -> BTreeSet<String> {
        self.gates.iter().flatten().flat_map(SaGate::params).collect()
    }

    /// Exact counts of the network's shape and gate profiles.
    pub fn profile(&self) -> NetProfile {
        let mut layers = Vec::with_capacity(self.layers.len());
        let mut strict = true;
        for (li, (nodes, gates)) in self.layers.iter().zip(&self.gates).enumerate() {
            let mut lp = LayerProfile { m: nodes.len(), t: 0, alpha: 0, beta: 0, fan_in: 0 };
            for (node, gate) in nodes.iter().zip(gates) {
                let g = gate.profile();
                lp.t = lp.t.max(g.t);
                lp.alpha = lp.alpha.max(g.alpha);
                lp.beta = lp.beta.max(g.beta);
                let inner = node.parents.iter().filter(|p| p.0 > 0).count();
                let outer = usize::from(node.parents.iter().any(|p| p.0 == 0));
                lp.fan_in = lp.fan_in.max(inner + outer);
                strict &= node.parents.iter().all(|p| p.0 == li);
            }
            layers.push(lp);
        }
        NetProfile {
            dim: self.dim,
            l: self.layers.len(),
            m: self.node_count(),
            layers,
            p: self.distinct_params(),
            strict,
        }
    }

    /// Named parameters count once per name; literal coefficients of
    /// parameter-free monomials and tree constants count once per nonzero
    /// value.
    fn distinct_params(&self) -> usize {
        let mut polys: Vec<&MPoly> = Vec::new();
        let mut values = BTreeSet::new();
        for node in self.layers.iter().flatten() {
            match &node.gate {
                GateSpec::Relu { a, b } => polys.extend(a.iter().chain(std::iter::once(b))),
                GateSpec::Max { ps } | GateSpec::Min { ps } => polys.extend(ps),
                GateSpec::Polyact { q, .. } => polys.push(q),
                GateSpec::Sa { preds, terms } => polys.extend(preds.iter().chain(terms.iter().map(|t| &t.poly))),
                GateSpec::Dt { tree } => tree_constants(tree, &mut |c| {
                    values.insert(c.clone());
                }),
                GateSpec::Bdt { weights, trees } => {
                    values.extend(weights.iter().cloned());
                    for t in trees {
                        tree_constants(t, &mut |c| {
                            values.insert(c.clone());
                        });
                    }
                }
            }
        }
        let mut names = BTreeSet::new();
        for p in polys {
            for (mono, c) in p.terms() {
                for (v, _) in mono {
                    if let Var::Param(n) = v {
                        names.insert(n.clone());
                    }
                }
                if mono.iter().all(|(v, _)| matches!(v, Var::Input(_))) {
                    values.insert(c.clone());
                }
            }
        }
        values.remove(&Rat::zero());
        names.len() + values.len()
    }

    fn check_params(&self) -> Result<()> {
        match self.used_params().into_iter().find(|n| !self.params.contains_key(n)) {
            Some(name) => Err(Error::UnboundVariable(name)),
            None => Ok(()),
        }
    }

    fn eval_with(&self, x: &[Rat], node: impl Fn(usize, usize, &[Rat]) -> Result<Rat>) -> Result<Rat> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        self.check_params()?;
        let mut values: Vec<Vec<Rat>> = vec![x.to_vec()];
        for (li, layer) in self.layers.iter().enumerate() {
            let row = layer
                .iter()
                .enumerate()
                .map(|(ni, n)| {
                    let args: Vec<Rat> = n.parents.iter().map(|&(pl, pi)| values[pl][pi].clone()).collect();
                    node(li, ni, &args)
                })
                .collect::<Result<Vec<_>>>()?;
            values.push(row);
        }
        Ok(values.pop().unwrap().pop().unwrap())
    }

    /// `F(w, x)` evaluated exactly through the encoded gates.
    pub fn eval(&self, x: &[Rat]) -> Result<Rat> {
        self.eval_with(x, |li, ni, v| self.gates[li][ni].eval(v, &self.params))
    }

    /// Same as [`NetworkGraph::eval`] but through each gate's direct
    /// semantics (max, tree lookup, ...), bypassing the encodings.
    pub fn eval_direct(&self, x: &[Rat]) -> Result<Rat> {
        self.eval_with(x, |li, ni, v| self.layers[li][ni].gate.eval_direct(v, &self.params))
    }

    /// The univariate network `z ↦ F(w, a·z + b)`: every gate reading input
    /// coordinates gets the affine map substituted into its polynomials.
    pub fn restrict_line(&self, line: &LineMap) -> Result<NetworkGraph> {
        if line.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: line.dim() });
        }
        let z = MPoly::input(0);
        let mut layers = self.layers.clone();
        for (li, layer) in layers.iter_mut().enumerate() {
            for (ni, node) in layer.iter_mut().enumerate() {
                if node.parents.iter().all(|p| p.0 != 0) {
                    continue;
                }
                let mut parents = vec![(0, 0)];
                let mut args = Vec::with_capacity(node.parents.len());
                for &(pl, pi) in &node.parents {
                    if pl == 0 {
                        let a = &line.a[pi];
                        args.push(&z.scale(a) + &MPoly::constant(line.b[pi].clone()));
                    } else {
                        args.push(MPoly::input(parents.len() as u32));
                        parents.push((pl, pi));
                    }
                }
                let g = self.gates[li][ni].substitute_inputs(&args, parents.len())?;
                node.gate = GateSpec::Sa { preds: g.preds().to_vec(), terms: g.terms().to_vec() };
                node.parents = parents;
            }
        }
        NetworkGraph::new(1, self.params.clone(), layers)
    }
}

fn tree_constants(t: &crate::gates::DecisionTree, f: &mut impl FnMut(&Rat)) {
    use crate::gates::DecisionTree;
    match t {
        DecisionTree::Leaf { leaf } => f(leaf),
        DecisionTree::Split { a, b, left, right } => {
            a.iter().for_each(&mut *f);
            f(b);
            tree_constants(left, f);
            tree_constants(right, f);
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exact::rat;

    fn single_relu() -> NetworkGraph {
        NetworkGraph::new(1, BTreeMap::new(), vec![vec![Node::new(GateSpec::relu_rat(&[rat(1, 1)], &Rat::zero()), vec![(0, 0)])]])
            .unwrap()
    }

    pub(crate) fn triangle() -> NetworkGraph {
        let params = BTreeMap::from([
            ("w".to_string(), rat(1, 1)),
            ("b".to_string(), rat(-1, 2)),
            ("c2".to_string(), rat(2, 1)),
            ("c4".to_string(), rat(-4, 1)),
        ]);
        let l1 = vec![
            Node::new(GateSpec::relu(vec![MPoly::param("w")], MPoly::zero()), vec![(0, 0)]),
            Node::new(GateSpec::relu_named(&["w"], "b"), vec![(0, 0)]),
        ];
        let l2 = vec![Node::new(GateSpec::relu(vec![MPoly::param("c2"), MPoly::param("c4")], MPoly::zero()), vec![(1, 0), (1, 1)])];
        NetworkGraph::new(1, params, vec![l1, l2]).unwrap()
    }

    #[test]
    fn profiles() {
        let p = single_relu().profile();
        assert_eq!((p.l, p.m, p.p), (1, 1, 1));
        assert_eq!((p.layers[0].t, p.layers[0].alpha, p.layers[0].beta), (1, 1, 1));
        let p = triangle().profile();
        assert_eq!((p.l, p.m, p.p), (2, 3, 4));
        assert!(p.strict);
        assert_eq!(p.max_width(), 2);
    }

    #[test]
    fn evaluation() {
        let t = triangle();
        assert_eq!(t.eval(&[rat(1, 2)]).unwrap(), Rat::one());
        assert_eq!(t.eval(&[rat(-1, 1)]).unwrap(), Rat::zero());
        assert_eq!(t.eval_direct(&[rat(3, 4)]).unwrap(), rat(1, 2));
        assert!(matches!(t.eval(&[]), Err(Error::DimensionMismatch { .. })));
        let unbound = t.with_params(BTreeMap::new());
        assert!(matches!(unbound.eval(&[Rat::zero()]), Err(Error::UnboundVariable(_))));
    }

    #[test]
    fn validation() {
        let relu = || GateSpec::relu_rat(&[rat(1, 1)], &Rat::zero());
        let none = BTreeMap::new;
        assert!(NetworkGraph::new(1, none(), vec![]).is_err());
        assert!(NetworkGraph::new(1, none(), vec![vec![Node::new(relu(), vec![(0, 1)])]]).is_err());
        assert!(NetworkGraph::new(1, none(), vec![vec![Node::new(relu(), vec![(1, 0)])]]).is_err());
        assert!(NetworkGraph::new(1, none(), vec![vec![Node::new(relu(), vec![(0, 0)]), Node::new(relu(), vec![(0, 0)])]]).is_err());
        // arity must match the parent count
        assert!(NetworkGraph::new(1, none(), vec![vec![Node::new(relu(), vec![])]]).is_err());
    }

    #[test]
    fn line_restriction() {
        let net = NetworkGraph::new(
            2,
            BTreeMap::new(),
            vec![vec![Node::new(GateSpec::relu_rat(&[rat(1, 1), rat(1, 1)], &Rat::zero()), vec![(0, 0), (0, 1)])]],
        )
        .unwrap();
        let line: LineMap = "1,0;0,3".parse().unwrap();
        let r = net.restrict_line(&line).unwrap();
        assert_eq!(r.dim(), 1);
        for z in [rat(-5, 1), rat(-3, 1), rat(-1, 2), rat(7, 3)] {
            assert_eq!(r.eval(std::slice::from_ref(&z)).unwrap(), net.eval(&line.at(&z)).unwrap());
            let direct = &z + &rat(3, 1);
            assert_eq!(r.eval(&[z]).unwrap(), if direct.is_negative() { Rat::zero() } else { direct });
        }
        assert_eq!(LineMap::axis(&[Rat::zero()]), line_with_b0());
        assert!(net.restrict_line(&LineMap::axis(&[])).is_err());
    }

    fn line_with_b0() -> LineMap {
        "1,0;0,0".parse().unwrap()
    }
}
