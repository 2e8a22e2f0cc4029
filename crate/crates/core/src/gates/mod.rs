//! Semi-algebraic gates: sums of polynomial terms switched on by sign
//! conditions of predicate polynomials, plus encoders for the usual gate
//! kinds (ReLU, piecewise-polynomial activations, max/min, trees).

mod encode;
mod format;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::exact::{MPoly, Rat};
use crate::{Error, Result};

pub use encode::{
    encode_bdt, encode_dt, encode_max, encode_min, encode_poly_activation, encode_relu, BoostedTrees, DecisionTree,
};
pub use format::GateSpec;

/// One summand `p(v) · ∏_{i∈lower} 1[qᵢ(v) < 0] · ∏_{i∈upper} 1[qᵢ(v) ≥ 0]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    #[serde(default)]
    pub lower: Vec<usize>,
    #[serde(default)]
    pub upper: Vec<usize>,
    pub poly: MPoly,
}

impl Term {
    pub fn new(lower: Vec<usize>, upper: Vec<usize>, poly: MPoly) -> Term {
        Term { lower, upper, poly }
    }

    /// Whether the indicator product is 1 given the predicate signs.
    pub fn fires(&self, nonneg: &[bool]) -> bool {
        self.lower.iter().all(|&i| !nonneg[i]) && self.upper.iter().all(|&i| nonneg[i])
    }
}

/// `(t, α, β)` together with the term count `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaProfile {
    pub t: usize,
    pub alpha: usize,
    pub beta: usize,
    pub m: usize,
}

impl SaProfile {
    pub fn new(t: usize, alpha: usize, beta: usize) -> SaProfile {
        SaProfile { t, alpha, beta, m: 0 }
    }

    /// Whether `(t, α, β)` is within `other`'s; `m` is not compared.
    pub fn fits_within(&self, other: &SaProfile) -> bool {
        self.t <= other.t && self.alpha <= other.alpha && self.beta <= other.beta
    }
}

/// A semi-algebraic gate on `arity` inputs. Coefficients may contain named
/// parameters until [`SaGate::bind`] is applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaGate {
    arity: usize,
    preds: Vec<MPoly>,
    terms: Vec<Term>,
}

impl SaGate {
    pub fn new(arity: usize, preds: Vec<MPoly>, terms: Vec<Term>) -> Result<SaGate> {
        for t in &terms {
            if let Some(&i) = t.lower.iter().chain(&t.upper).find(|&&i| i >= preds.len()) {
                return Err(Error::InvalidArgument(format!("term refers to predicate {i} of {}", preds.len())));
            }
        }
        let used = preds.iter().chain(terms.iter().map(|t| &t.poly)).map(MPoly::input_count).max().unwrap_or(0);
        if used > arity {
            return Err(Error::ArityMismatch { expected: arity, got: used });
        }
        Ok(SaGate { arity, preds, terms })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn preds(&self) -> &[MPoly] {
        &self.preds
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// The realized profile: predicate count, largest predicate degree,
    /// largest term degree (degrees in the inputs only).
    pub fn profile(&self) -> SaProfile {
        SaProfile {
            t: self.preds.len(),
            alpha: self.preds.iter().map(MPoly::input_degree).max().unwrap_or(0),
            beta: self.terms.iter().map(|t| t.poly.input_degree()).max().unwrap_or(0),
            m: self.terms.len(),
        }
    }

    /// Names of the parameters still symbolic in the gate.
    pub fn params(&self) -> BTreeSet<String> {
        self.preds.iter().chain(self.terms.iter().map(|t| &t.poly)).flat_map(MPoly::params).collect()
    }

    /// Substitute parameter values; every parameter must be bound.
    pub fn bind(&self, values: &BTreeMap<String, Rat>) -> Result<SaGate> {
        Ok(SaGate {
            arity: self.arity,
            preds: self.preds.iter().map(|q| q.bind_params(values)).collect::<Result<_>>()?,
            terms: self
                .terms
                .iter()
                .map(|t| Ok(Term { poly: t.poly.bind_params(values)?, ..t.clone() }))
                .collect::<Result<_>>()?,
        })
    }

    /// Replace the inputs by polynomials in `new_arity` fresh inputs.
    pub fn substitute_inputs(&self, args: &[MPoly], new_arity: usize) -> Result<SaGate> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: args.len() });
        }
        let preds = self.preds.iter().map(|q| q.substitute_inputs(args)).collect::<Result<_>>()?;
        let terms = self
            .terms
            .iter()
            .map(|t| Ok(Term { poly: t.poly.substitute_inputs(args)?, ..t.clone() }))
            .collect::<Result<_>>()?;
        SaGate::new(new_arity, preds, terms)
    }

    /// Multiply every term by `c`.
    pub fn scaled(&self, c: &Rat) -> SaGate {
        SaGate {
            arity: self.arity,
            preds: self.preds.clone(),
            terms: self.terms.iter().map(|t| Term { poly: t.poly.scale(c), ..t.clone() }).collect(),
        }
    }

    /// The defining sum evaluated literally: overlapping terms all count.
    pub fn eval(&self, v: &[Rat], params: &BTreeMap<String, Rat>) -> Result<Rat> {
        if v.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: v.len() });
        }
        let nonneg: Vec<bool> = self
            .preds
            .iter()
            .map(|q| Ok(!q.eval(v, params)?.is_negative()))
            .collect::<Result<_>>()?;
        let mut acc = Rat::zero();
        for t in &self.terms {
            if t.fires(&nonneg) {
                acc += t.poly.eval(v, params)?;
            }
        }
        Ok(acc)
    }
}
