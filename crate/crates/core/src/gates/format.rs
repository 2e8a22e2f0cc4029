use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::encode::relu_of;
use super::{encode_bdt, encode_dt, encode_max, encode_min, encode_poly_activation, BoostedTrees, DecisionTree, SaGate, Term};
use crate::exact::{MPoly, Rat};
use crate::piecewise::PiecewisePoly;
use crate::{Error, Result};

/// Serialized gate description, tagged by `"gate"`. Coefficients are
/// polynomial strings, so they may name shared parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum GateSpec {
    /// `max(0, Σ aᵢ·vᵢ + b)`.
    Relu {
        a: Vec<MPoly>,
        #[serde(default)]
        b: MPoly,
    },
    Max { ps: Vec<MPoly> },
    Min { ps: Vec<MPoly> },
    /// `σ(q(v))` for a piecewise-polynomial `σ`.
    Polyact { sigma: PiecewisePoly, q: MPoly },
    /// A gate given directly by predicates and terms.
    Sa { preds: Vec<MPoly>, terms: Vec<Term> },
    Dt { tree: DecisionTree },
    Bdt { weights: Vec<Rat>, trees: Vec<DecisionTree> },
}

impl GateSpec {
    pub fn relu(a: Vec<MPoly>, b: MPoly) -> GateSpec {
        GateSpec::Relu { a, b }
    }

    /// ReLU with rational weights.
    pub fn relu_rat(a: &[Rat], b: &Rat) -> GateSpec {
        GateSpec::Relu { a: a.iter().map(|c| MPoly::constant(c.clone())).collect(), b: MPoly::constant(b.clone()) }
    }

    /// ReLU whose weights and bias are named parameters.
    pub fn relu_named(a: &[&str], b: &str) -> GateSpec {
        GateSpec::Relu { a: a.iter().map(|n| MPoly::param(n)).collect(), b: MPoly::param(b) }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            GateSpec::Relu { .. } => "relu",
            GateSpec::Max { .. } => "max",
            GateSpec::Min { .. } => "min",
            GateSpec::Polyact { .. } => "polyact",
            GateSpec::Sa { .. } => "sa",
            GateSpec::Dt { .. } => "dt",
            GateSpec::Bdt { .. } => "bdt",
        }
    }

    fn relu_poly(a: &[MPoly], b: &MPoly) -> MPoly {
        a.iter().enumerate().fold(b.clone(), |acc, (i, c)| &acc + &(c * &MPoly::input(i as u32)))
    }

    /// The gate on `arity` inputs.
    pub fn to_gate(&self, arity: usize) -> Result<SaGate> {
        let g = match self {
            GateSpec::Relu { a, b } => relu_of(GateSpec::relu_poly(a, b)),
            GateSpec::Max { ps } => encode_max(ps)?,
            GateSpec::Min { ps } => encode_min(ps)?,
            GateSpec::Polyact { sigma, q } => encode_poly_activation(sigma, q)?,
            GateSpec::Sa { preds, terms } => SaGate::new(arity, preds.clone(), terms.clone())?,
            GateSpec::Dt { tree } => encode_dt(tree),
            GateSpec::Bdt { weights, trees } => encode_bdt(&BoostedTrees::new(weights.clone(), trees.clone())?),
        };
        SaGate::new(arity, g.preds, g.terms)
    }

    /// Direct semantic evaluation, independent of the gate encoding.
    pub fn eval_direct(&self, v: &[Rat], params: &BTreeMap<String, Rat>) -> Result<Rat> {
        let all = |ps: &[MPoly]| ps.iter().map(|p| p.eval(v, params)).collect::<Result<Vec<Rat>>>();
        match self {
            GateSpec::Relu { a, b } => {
                let s = GateSpec::relu_poly(a, b).eval(v, params)?;
                Ok(if s.is_negative() { Rat::zero() } else { s })
            }
            GateSpec::Max { ps } => all(ps)?.into_iter().max().ok_or(Error::InvalidArgument("max of an empty list".into())),
            GateSpec::Min { ps } => all(ps)?.into_iter().min().ok_or(Error::InvalidArgument("min of an empty list".into())),
            GateSpec::Polyact { sigma, q } => Ok(sigma.eval_rat(&q.eval(v, params)?)),
            GateSpec::Sa { preds, terms } => SaGate::new(v.len(), preds.clone(), terms.clone())?.eval(v, params),
            GateSpec::Dt { tree } => Ok(tree.eval(v)),
            GateSpec::Bdt { weights, trees } => Ok(BoostedTrees::new(weights.clone(), trees.clone())?.eval(v)),
        }
    }
}
