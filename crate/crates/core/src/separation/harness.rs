use serde::{Deserialize, Serialize};

use super::Candidate;
use crate::constructions::hard_network;
use crate::exact::{Enclosure, Rat};
use crate::gates::BoostedTrees;
use crate::network::{crossing_bound, layered_bound, LineMap, NetProfile};
use crate::piecewise::{l1_distance, Classified, CrossingReport, LinearL1, PiecewisePoly};
use crate::{Error, Result};

/// Size limits of the shallow class compared against `f^{k³+4}`: networks
/// with at most `k` layers and `m·t·α·β ≤ 2^k`, boosted trees with
/// `t·nodes ≤ 2^{k³}`, polynomials of degree at most `2^{k−3}`. Zero
/// profile entries count as 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassLimits {
    pub k: u32,
}

fn pow2(e: u32) -> u128 {
    1u128.checked_shl(e).unwrap_or(u128::MAX)
}

impl ClassLimits {
    pub fn new(k: u32) -> ClassLimits {
        ClassLimits { k }
    }

    pub fn check_net(&self, prof: &NetProfile) -> Result<()> {
        if prof.l > self.k as usize {
            return Err(Error::ClassViolation(format!("{} layers exceed k = {}", prof.l, self.k)));
        }
        let cost = [prof.m, prof.max_t(), prof.max_alpha(), prof.max_beta()]
            .iter()
            .fold(1u128, |acc, &x| acc.saturating_mul(x.max(1) as u128));
        if cost > pow2(self.k) {
            return Err(Error::ClassViolation(format!("m·t·α·β = {cost} exceeds 2^{}", self.k)));
        }
        Ok(())
    }

    pub fn check_bdt(&self, b: &BoostedTrees) -> Result<()> {
        let cost = (b.trees.len().max(1) as u128).saturating_mul(b.max_nodes() as u128);
        let budget = pow2(self.k.saturating_pow(3));
        if cost > budget {
            return Err(Error::ClassViolation(format!("{} trees of up to {} nodes exceed 2^{}", b.trees.len(), b.max_nodes(), self.k.pow(3))));
        }
        Ok(())
    }

    pub fn check_poly(&self, degree: usize) -> Result<()> {
        if (degree as u128).saturating_mul(8) > pow2(self.k) {
            return Err(Error::ClassViolation(format!("degree {degree} exceeds 2^{}", self.k as i64 - 3)));
        }
        Ok(())
    }

    pub fn check(&self, c: &Candidate) -> Result<()> {
        match c {
            Candidate::Net(n) => self.check_net(&n.profile()),
            Candidate::Bdt(b) => self.check_bdt(b),
            Candidate::Poly(p) => self.check_poly(p.degree_or_zero()),
        }
    }

    /// `2^{k³+2}`, the crossing budget of the class.
    pub fn crossing_budget(&self) -> Rat {
        Rat::from_int(2).pow(self.k.pow(3) as i32 + 2)
    }
}

/// The deep target `f^{k³+4}` along `p_y`, compiled once.
pub struct SeparationTarget {
    pub k: u32,
    pub dim: usize,
    pub f: PiecewisePoly,
    pub cr: usize,
    fast: Option<LinearL1>,
    classified: Classified,
}

impl SeparationTarget {
    /// Only `k ≤ 2` is feasible: the target has `2^{k³+4} + 1` crossings.
    pub fn new(k: u32, dim: usize) -> Result<SeparationTarget> {
        if !(1..=2).contains(&k) {
            return Err(Error::InvalidArgument(format!("k = {k}: only k = 1, 2 can be compiled")));
        }
        let net = hard_network(k as usize, dim)?;
        let f = net.restrict_line(&LineMap::axis(&vec![Rat::zero(); dim - 1]))?.compile()?.output;
        let cr = f.crossing_number();
        let fast = LinearL1::new(&f, &Rat::zero(), &Rat::one())?;
        let classified = f.classified();
        Ok(SeparationTarget { k, dim, f, cr, fast, classified })
    }

    /// Classifier comparison of the target against `g`.
    pub fn disagreement(&self, g: &PiecewisePoly) -> CrossingReport {
        self.classified.disagreement(g)
    }

    pub fn l1(&self, g: &PiecewisePoly, width: &Rat) -> Result<Enclosure> {
        match &self.fast {
            Some(fast) => fast.distance(g, width),
            None => l1_distance(&self.f, g, &Rat::zero(), &Rat::one(), width),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub id: usize,
    pub kind: String,
    pub layers: usize,
    pub nodes: usize,
    pub trees: usize,
    /// `Cr(g∘p_y)`.
    pub cr: usize,
    /// The a-priori bound on `Cr(g∘p_y)` for the candidate's shape.
    pub bound: Rat,
    pub l1: Enclosure,
    pub disagreement: CrossingReport,
    /// Every link of the lower-bound chain checked exactly.
    pub chain: bool,
    /// `L¹ ≥ 1/64`, from the lower end of the enclosure.
    pub pass: bool,
}

pub const CSV_HEADER: &str = "id,kind,layers,nodes,trees,cr,bound,l1_low,l1_high,disagree,chain,pass";

impl SeparationReport {
    pub fn csv_row(&self) -> String {
        // exact distances stay rational, others are rounded outward
        let (lo, hi) = if self.l1.exact {
            (self.l1.low.to_string(), self.l1.high.to_string())
        } else {
            let d = self.l1.decimal(12);
            let (a, b) = d[1..d.len() - 1].split_once(',').expect("interval form");
            (a.to_string(), b.to_string())
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.id,
            self.kind,
            self.layers,
            self.nodes,
            self.trees,
            self.cr,
            self.bound,
            lo,
            hi,
            self.disagreement.disagree,
            self.chain,
            self.pass
        )
    }
}

fn shape_bound(c: &Candidate) -> Rat {
    match c {
        Candidate::Net(n) => {
            let prof = n.profile();
            match crossing_bound(&prof) {
                Ok(b) => b.simplified.unwrap_or(b.layered),
                Err(_) => layered_bound(&prof),
            }
        }
        Candidate::Bdt(b) => Rat::from_int(2 * b.trees.len() as i64 * b.max_nodes() as i64),
        Candidate::Poly(p) => Rat::from_int(1 + p.degree_or_zero() as i64),
    }
}

/// Compare one candidate against the deep target along `line = p_y`.
pub fn verify_separation(target: &SeparationTarget, id: usize, candidate: &Candidate, line: &LineMap, width: &Rat) -> Result<SeparationReport> {
    if line.dim() != target.dim {
        return Err(Error::DimensionMismatch { expected: target.dim, got: line.dim() });
    }
    if line.a.iter().enumerate().any(|(i, a)| *a != if i == 0 { Rat::one() } else { Rat::zero() }) || !line.b[0].is_zero() {
        return Err(Error::InvalidArgument("the line must be of the form z ↦ (z, y)".into()));
    }
    let limits = ClassLimits::new(target.k);
    limits.check(candidate)?;
    let g = candidate.along(line)?;
    let cr = g.crossing_number();
    let bound = shape_bound(candidate);
    let l1 = target.l1(&g, width)?;
    let disagreement = target.disagreement(&g);

    let budget = limits.crossing_budget();
    let cr_r = Rat::from_int(cr as i64);
    let chain_rhs = Rat::new(1, 32) * (Rat::one() - Rat::new(2 * cr as i64, target.cr as i64));
    let chain = disagreement.satisfies_bound() && cr_r <= bound && bound <= budget && (cr_r > budget || l1.low >= chain_rhs);
    let pass = l1.low >= Rat::new(1, 64);
    let (layers, nodes, trees) = match candidate {
        Candidate::Net(n) => (n.depth(), n.node_count(), 0),
        Candidate::Bdt(b) => (1, b.trees.iter().map(|t| t.node_count()).sum(), b.trees.len()),
        Candidate::Poly(_) => (1, 1, 0),
    };
    Ok(SeparationReport { id, kind: candidate.kind_name().into(), layers, nodes, trees, cr, bound, l1, disagreement, chain, pass })
}
