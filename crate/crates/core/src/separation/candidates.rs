//! Seeded, enumerable candidate families and a brute-force search over them.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SeparationTarget;
use crate::exact::{Enclosure, Poly, Rat};
use crate::gates::{BoostedTrees, DecisionTree, GateSpec};
use crate::network::{LineMap, NetworkGraph, Node};
use crate::partition::{Cut, CutKind, Partition};
use crate::piecewise::PiecewisePoly;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Candidate {
    Net(NetworkGraph),
    Bdt(BoostedTrees),
    Poly(Poly),
}

impl Candidate {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Candidate::Net(_) => "net",
            Candidate::Bdt(_) => "bdt",
            Candidate::Poly(_) => "poly",
        }
    }

    /// The candidate composed with `line`, as a piecewise polynomial.
    pub fn along(&self, line: &LineMap) -> Result<PiecewisePoly> {
        match self {
            Candidate::Net(n) => Ok(n.restrict_line(line)?.compile()?.output),
            Candidate::Bdt(b) => {
                let d = line.dim();
                let gate = GateSpec::Bdt { weights: b.weights.clone(), trees: b.trees.clone() };
                let net = NetworkGraph::new(d, BTreeMap::new(), vec![vec![Node::new(gate, (0..d).map(|i| (0, i)).collect())]])?;
                Ok(net.restrict_line(line)?.compile()?.output)
            }
            Candidate::Poly(p) => {
                if line.dim() != 1 {
                    return Err(Error::DimensionMismatch { expected: 1, got: line.dim() });
                }
                Ok(PiecewisePoly::from_poly(p.compose(&Poly::linear(line.b[0].clone(), line.a[0].clone()))))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateKind {
    /// ReLU networks with the given hidden widths and one output node.
    Net,
    /// Weighted sums of stumps (or of constant leaves when the node budget
    /// is below 3).
    Bdt,
    Poly,
}

/// A candidate family: every coefficient slot ranges over `values`. The
/// family is enumerated in full when it has at most `count` members and
/// sampled with `seed` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSpec {
    pub kind: CandidateKind,
    pub k: u32,
    #[serde(default)]
    pub widths: Vec<usize>,
    #[serde(default)]
    pub max_trees: usize,
    #[serde(default)]
    pub degree: usize,
    pub values: Vec<Rat>,
    pub count: usize,
    pub seed: u64,
}

/// `{−range, −range + step, …, range}`.
pub fn grid(step: &Rat, range: &Rat) -> Vec<Rat> {
    let n = (range / step).floor().to_i64().unwrap_or(0);
    (-n..=n).map(|i| step * &Rat::from_int(i)).collect()
}

impl CandidateSpec {
    /// Named families: `relu-grid` (k = 1: all `σ(az + b)` with `a, b` on a
    /// 1/16 grid in `[−4, 4]`; k ≥ 2: 10⁴ sampled width-`2^k − 1` nets on a
    /// 1/8 grid), `stumps` (10³ boosted stumps), `poly` (10³ polynomials).
    pub fn preset(name: &str, k: u32, seed: u64) -> Result<CandidateSpec> {
        let four = Rat::from_int(4);
        let base = CandidateSpec {
            kind: CandidateKind::Net,
            k,
            widths: vec![],
            max_trees: 0,
            degree: 0,
            values: vec![],
            count: 10_000,
            seed,
        };
        Ok(match name {
            "relu-grid" if k <= 1 => CandidateSpec { values: grid(&Rat::new(1, 16), &four), count: 20_000, ..base },
            "relu-grid" => CandidateSpec {
                widths: vec![(1usize << k.min(6)) - 1],
                values: grid(&Rat::new(1, 8), &four),
                ..base
            },
            "stumps" => CandidateSpec {
                kind: CandidateKind::Bdt,
                max_trees: 16,
                values: grid(&Rat::new(1, 16), &Rat::new(5, 4)),
                count: 1_000,
                ..base
            },
            "poly" => CandidateSpec {
                kind: CandidateKind::Poly,
                degree: (1usize << k.min(20)) / 8,
                values: grid(&Rat::new(1, 8), &Rat::from_int(2)),
                count: 1_000,
                ..base
            },
            _ => return Err(Error::InvalidArgument(format!("unknown candidate family `{name}`"))),
        })
    }

    fn net_slots(&self) -> usize {
        let mut prev = 1;
        let mut slots = 0;
        for &w in self.widths.iter().chain(std::iter::once(&1)) {
            slots += w * (prev + 1);
            prev = w;
        }
        slots
    }

    fn build_net(&self, coef: &[Rat]) -> Result<NetworkGraph> {
        let mut it = coef.iter().cloned();
        let mut layers = Vec::new();
        let mut prev = 1;
        for (li, &w) in self.widths.iter().chain(std::iter::once(&1)).enumerate() {
            let layer = (0..w)
                .map(|_| {
                    let a: Vec<Rat> = it.by_ref().take(prev).collect();
                    let b = it.next().expect("slot count");
                    Node::new(GateSpec::relu_rat(&a, &b), (0..prev).map(|i| (li, i)).collect())
                })
                .collect();
            layers.push(layer);
            prev = w;
        }
        NetworkGraph::new(1, BTreeMap::new(), layers)
    }

    fn tree_nodes(&self, trees: usize) -> usize {
        let budget = 1u128.checked_shl(self.k.saturating_pow(3)).unwrap_or(u128::MAX) / trees as u128;
        if budget >= 3 {
            3
        } else {
            1
        }
    }

    /// The members of the family, in a fixed order.
    pub fn generate(&self) -> Result<Vec<Candidate>> {
        if self.values.is_empty() || self.count == 0 {
            return Err(Error::EmptySearchSpace);
        }
        let v = self.values.len();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let pick = |rng: &mut ChaCha8Rng| self.values[rng.gen_range(0..v)].clone();
        let mut out = Vec::with_capacity(self.count);
        match self.kind {
            CandidateKind::Net => {
                let slots = self.net_slots();
                let size = (v as u128).checked_pow(slots as u32);
                if size.is_some_and(|s| s <= self.count as u128) {
                    // odometer over all slot assignments
                    let mut idx = vec![0usize; slots];
                    loop {
                        let coef: Vec<Rat> = idx.iter().map(|&i| self.values[i].clone()).collect();
                        out.push(Candidate::Net(self.build_net(&coef)?));
                        let Some(pos) = (0..slots).rev().find(|&p| idx[p] + 1 < v) else { break };
                        idx[pos] += 1;
                        idx[pos + 1..].iter_mut().for_each(|i| *i = 0);
                    }
                } else {
                    for _ in 0..self.count {
                        let coef: Vec<Rat> = (0..slots).map(|_| pick(&mut rng)).collect();
                        out.push(Candidate::Net(self.build_net(&coef)?));
                    }
                }
            }
            CandidateKind::Bdt => {
                // even single leaves must fit the t·nodes budget
                let budget = 1u128.checked_shl(self.k.saturating_pow(3)).unwrap_or(u128::MAX);
                let max_trees = (self.max_trees.max(1) as u128).min(budget) as usize;
                for _ in 0..self.count {
                    let t = rng.gen_range(1..=max_trees);
                    let nodes = self.tree_nodes(t);
                    let mut weights = Vec::with_capacity(t);
                    let mut trees = Vec::with_capacity(t);
                    for _ in 0..t {
                        weights.push(pick(&mut rng));
                        trees.push(if nodes >= 3 {
                            DecisionTree::stump(pick(&mut rng), pick(&mut rng), pick(&mut rng))
                        } else {
                            DecisionTree::leaf(pick(&mut rng))
                        });
                    }
                    out.push(Candidate::Bdt(BoostedTrees::new(weights, trees)?));
                }
            }
            CandidateKind::Poly => {
                for _ in 0..self.count {
                    out.push(Candidate::Poly(Poly::new((0..=self.degree).map(|_| pick(&mut rng)).collect())));
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub index: usize,
    pub best: Candidate,
    /// L¹ distance to the target on `[0, 1]`.
    pub l1: Enclosure,
    pub evaluated: usize,
}

/// The member of the family (first `budget` members) with the smallest
/// upper L¹ bound against `target` on `[0, 1]`. Ties go to the earliest.
/// This is a best-found value, not a certified optimum.
pub fn candidate_search(spec: &CandidateSpec, target: &PiecewisePoly, budget: usize, width: &Rat) -> Result<SearchResult> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be positive".into()));
    }
    let family = spec.generate()?;
    let fast = crate::piecewise::LinearL1::new(target, &Rat::zero(), &Rat::one())?;
    let line = LineMap::axis(&[]);
    let mut best: Option<(usize, Enclosure)> = None;
    let n = family.len().min(budget);
    for (i, c) in family.iter().take(n).enumerate() {
        let g = c.along(&line)?;
        let d = match &fast {
            Some(f) => f.distance(&g, width)?,
            None => crate::piecewise::l1_distance(target, &g, &Rat::zero(), &Rat::one(), width)?,
        };
        if best.as_ref().is_none_or(|(_, b)| d.high < b.high) {
            best = Some((i, d));
        }
    }
    let (index, l1) = best.ok_or(Error::EmptySearchSpace)?;
    Ok(SearchResult { index, best: family[index].clone(), l1, evaluated: n })
}

/// `n` seeded univariate functions with crossing number at most
/// `2^{k−2}`: alternating step functions, and small ReLU networks kept only
/// when they meet the crossing cap.
pub fn random_low_crossing(k: u32, n: usize, seed: u64) -> Result<Vec<PiecewisePoly>> {
    if k < 2 {
        return Err(Error::InvalidArgument("the crossing cap 2^(k-2) needs k ≥ 2".into()));
    }
    let cap = 1usize << (k - 2).min(20);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nets = CandidateSpec {
        kind: super::CandidateKind::Net,
        k: 2,
        widths: vec![2],
        max_trees: 0,
        degree: 0,
        values: grid(&Rat::new(1, 4), &Rat::from_int(2)),
        count: 1,
        seed: 0,
    };
    let line = LineMap::axis(&[]);
    let denom = 1i64 << (k + 3);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        if out.len() % 2 == 1 {
            let mut found = None;
            for _ in 0..50 {
                let spec = CandidateSpec { seed: rng.gen(), ..nets.clone() };
                let g = spec.generate()?.remove(0).along(&line)?;
                if g.crossing_number() <= cap {
                    found = Some(g);
                    break;
                }
            }
            if let Some(g) = found {
                out.push(g);
                continue;
            }
        }
        // alternating step function with c pieces
        let c = rng.gen_range(1..=cap);
        let mut knots: Vec<i64> = Vec::with_capacity(c - 1);
        while knots.len() < c - 1 {
            let x = rng.gen_range(-denom / 8..=denom + denom / 8);
            if !knots.contains(&x) {
                knots.push(x);
            }
        }
        knots.sort_unstable();
        let cuts = knots
            .iter()
            .map(|&x| Cut::new(Rat::new(x, denom).into(), if rng.gen() { CutKind::Left } else { CutKind::Right }))
            .collect();
        let mut above = rng.gen::<bool>();
        let polys = (0..c)
            .map(|_| {
                let v = if above { Rat::new(rng.gen_range(4..=8), 8) } else { Rat::new(rng.gen_range(0..=3), 8) };
                above = !above;
                Poly::constant(v)
            })
            .collect();
        out.push(PiecewisePoly::new(Partition::from_cuts(cuts)?, polys)?);
    }
    Ok(out)
}

/// Run [`super::verify_separation`] over a whole family on `p_0`.
pub fn verify_family(target: &SeparationTarget, family: &[Candidate], width: &Rat) -> Result<Vec<super::SeparationReport>> {
    let line = LineMap::axis(&vec![Rat::zero(); target.dim - 1]);
    family.iter().enumerate().map(|(i, c)| super::verify_separation(target, i, c, &line, width)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::triangle_relu;
    use crate::exact::rat;

    #[test]
    fn grid_and_enumeration() {
        assert_eq!(grid(&rat(1, 2), &rat(1, 1)).len(), 5);
        let spec = CandidateSpec::preset("relu-grid", 1, 7).unwrap();
        let fam = spec.generate().unwrap();
        assert_eq!(fam.len(), 129 * 129);
        assert!(CandidateSpec::preset("nope", 1, 7).is_err());
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let spec = CandidateSpec { count: 20, ..CandidateSpec::preset("relu-grid", 2, 7).unwrap() };
        assert_eq!(spec.generate().unwrap(), spec.generate().unwrap());
        let other = CandidateSpec { seed: 8, ..spec.clone() };
        assert_ne!(spec.generate().unwrap(), other.generate().unwrap());
    }

    #[test]
    fn search_finds_target_in_class() {
        let target = triangle_relu().compile().unwrap().output;
        let spec = CandidateSpec {
            kind: CandidateKind::Net,
            k: 2,
            widths: vec![2],
            max_trees: 0,
            degree: 0,
            values: vec![rat(-4, 1), rat(-1, 2), rat(0, 1), rat(1, 1), rat(2, 1)],
            count: 100_000,
            seed: 1,
        };
        let r = candidate_search(&spec, &target, usize::MAX, &rat(1, 1000)).unwrap();
        assert_eq!(r.l1, Enclosure::exact(Rat::zero()));
        assert!(candidate_search(&spec, &target, 0, &rat(1, 1000)).is_err());
    }

    #[test]
    fn low_crossing_generator_respects_cap() {
        for k in 2..=4 {
            for g in random_low_crossing(k, 30, 3).unwrap() {
                assert!(g.crossing_number() <= 1 << (k - 2));
            }
        }
    }
}
