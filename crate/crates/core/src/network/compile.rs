//! Layer-by-layer compilation of univariate networks into piecewise
//! polynomials, and the crossing-number bounds that go with it.

use serde::{Deserialize, Serialize};

use super::{NetProfile, NetworkGraph};
use crate::exact::Rat;
use crate::piecewise::PiecewisePoly;
use crate::{Error, Result};

/// What one layer produced, next to the a-priori bound for it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerTrace {
    /// Largest piece count over the layer's nodes, before simplification.
    pub pieces: usize,
    /// Same after merging equal neighbours.
    pub simplified: usize,
    pub degree: usize,
    pub piece_bound: Rat,
    pub degree_bound: Rat,
}

#[derive(Clone, Debug)]
pub struct Compiled {
    pub output: PiecewisePoly,
    pub trace: Vec<LayerTrace>,
}

impl Compiled {
    pub fn within_bounds(&self) -> bool {
        self.trace.iter().all(|t| {
            Rat::from_int(t.pieces as i64) <= t.piece_bound && Rat::from_int(t.degree as i64) <= t.degree_bound
        })
    }
}

/// Per-layer piece and degree bounds `(P_i, B_i)` for `i = 0..=l`.
///
/// Layer 0 is affine, so `(1, 1)`. A `(t, α, β)` gate reading `k` parents that
/// are `(P, B)`-poly is `(max(t,1)·k·P·(1 + αB), βB)`-poly.
fn layer_bounds(prof: &NetProfile) -> Vec<(Rat, Rat)> {
    let mut out = vec![(Rat::one(), Rat::one())];
    for lp in &prof.layers {
        let p_prev = out.iter().map(|x| &x.0).max().unwrap().clone();
        let b_prev = out.iter().map(|x| &x.1).max().unwrap().clone();
        let t = Rat::from_int(lp.t.max(1) as i64);
        let k = Rat::from_int(lp.fan_in.max(1) as i64);
        let alpha = Rat::from_int(lp.alpha as i64);
        let beta = Rat::from_int(lp.beta as i64);
        let p = &(&(&t * &k) * &p_prev) * &(Rat::one() + &alpha * &b_prev);
        out.push((p, &beta * &b_prev));
    }
    out
}

/// `P_l · (1 + B_l)`: a `(P, B)`-poly function changes side of 1/2 at most
/// `P·B` times, so its classifier has at most `P(1 + B)` pieces.
pub fn layered_bound(prof: &NetProfile) -> Rat {
    let (p, b) = layer_bounds(prof).pop().unwrap();
    &p * &(Rat::one() + b)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingBounds {
    /// `2(2tmα/l)^l β^{l²}`; only claimed for strictly layered networks.
    pub simplified: Option<Rat>,
    pub layered: Rat,
}

/// Both crossing-number bounds for networks with `α, β ≥ 1`.
pub fn crossing_bound(prof: &NetProfile) -> Result<CrossingBounds> {
    let (alpha, beta) = (prof.max_alpha(), prof.max_beta());
    if alpha < 1 || beta < 1 {
        return Err(Error::InvalidArgument(format!("crossing bound needs α, β ≥ 1, got α = {alpha}, β = {beta}")));
    }
    let simplified = prof.strict.then(|| {
        let l = prof.l as i64;
        let t = prof.max_t().max(1) as i64;
        let base = Rat::new(2 * t * prof.m as i64 * alpha as i64, l);
        Rat::from_int(2) * base.pow(l as i32) * Rat::from_int(beta as i64).pow((l * l) as i32)
    });
    Ok(CrossingBounds { simplified, layered: layered_bound(prof) })
}

/// A decision tree with `k` nodes along a line has at most `k` crossings.
pub fn dt_crossing_bound(k: usize) -> u64 {
    k as u64
}

/// `t` boosted trees of at most `k` nodes each: at most `2tk`.
pub fn bdt_crossing_bound(t: usize, k: usize) -> u64 {
    2 * t as u64 * k as u64
}

impl NetworkGraph {
    /// Compile a univariate network with bound parameters.
    pub fn compile(&self) -> Result<Compiled> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: self.dim });
        }
        self.check_params()?;
        let bounds = layer_bounds(&self.profile());
        let mut values: Vec<Vec<PiecewisePoly>> = vec![vec![PiecewisePoly::identity()]];
        let mut trace = Vec::with_capacity(self.layers.len());
        for (li, layer) in self.layers.iter().enumerate() {
            let mut row = Vec::with_capacity(layer.len());
            let (mut pieces, mut simplified, mut degree) = (0, 0, 0);
            for (ni, node) in layer.iter().enumerate() {
                let gate = self.gates[li][ni].bind(&self.params)?;
                let args: Vec<&PiecewisePoly> = node.parents.iter().map(|&(pl, pi)| &values[pl][pi]).collect();
                let raw = PiecewisePoly::apply_gate(&gate, &args)?;
                pieces = pieces.max(raw.len());
                let f = raw.simplify();
                simplified = simplified.max(f.len());
                degree = degree.max(f.degree());
                row.push(f);
            }
            let (piece_bound, degree_bound) = bounds[li + 1].clone();
            trace.push(LayerTrace { pieces, simplified, degree, piece_bound, degree_bound });
            values.push(row);
        }
        let output = values.pop().unwrap().pop().unwrap();
        Ok(Compiled { output, trace })
    }
}
