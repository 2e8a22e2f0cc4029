//! Sign structure of piecewise polynomials: threshold partitions,
//! classifiers and crossing numbers.

use serde::{Deserialize, Serialize};

use super::{roots_inside, sample_between, PiecewisePoly};
use crate::exact::{AlgebraicReal, Poly, Rat};
use crate::partition::{Cut, CutKind, Partition};

/// Where `f ≥ c` holds, as a partition refining that of `f` (or the
/// coarsest such partition when `coarsest` is set).
pub(crate) struct Split {
    pub partition: Partition,
    /// `f(x) ≥ c` on each piece.
    pub above: Vec<bool>,
}

struct Point {
    at: AlgebraicReal,
    above: bool,
    /// Kind of the original cut, `None` for roots inside a piece.
    kind: Option<CutKind>,
}

impl PiecewisePoly {
    /// Ordered regions and points on which `self ≥ c` is constant:
    /// `regions[j]` is the open stretch before `points[j]`.
    fn threshold_atoms(&self, c: &Rat) -> (Vec<bool>, Vec<Point>) {
        let part = &self.partition;
        let cuts = part.cuts();
        let mut regions = Vec::with_capacity(self.len());
        let mut points = Vec::with_capacity(cuts.len());
        let shift = Poly::constant(c.clone());
        let shifted = |p: &Poly| if c.is_zero() { p.clone() } else { p - &shift };
        for j in 0..=cuts.len() {
            let lo = j.checked_sub(1).map(|i| &cuts[i].at);
            let hi = cuts.get(j).map(|x| &x.at);
            let q = shifted(&self.polys[part.open_piece(j)]);
            let roots = roots_inside(&q, lo, hi).expect("nonzero polynomial");
            let mut from = lo;
            for r in &roots {
                regions.push(q.sign_at(&sample_between(from, Some(r))) >= 0);
                points.push(Point { at: r.clone(), above: true, kind: None });
                from = Some(r);
            }
            regions.push(q.sign_at(&sample_between(from, hi)) >= 0);
            if let Some(cut) = cuts.get(j) {
                let qa = shifted(&self.polys[part.point_piece(j)]);
                points.push(Point { at: cut.at.clone(), above: cut.at.sign_of_poly(&qa) >= 0, kind: Some(cut.kind) });
            }
        }
        (regions, points)
    }

    /// Partition on whose pieces `self ≥ c` is constant. With `coarsest`
    /// unset the result also refines the partition of `self`.
    pub(crate) fn split_at(&self, c: &Rat, coarsest: bool) -> Split {
        let (regions, points) = self.threshold_atoms(c);
        let mut cuts = Vec::new();
        let mut above = vec![regions[0]];
        for (j, p) in points.into_iter().enumerate() {
            let (l, v, r) = (regions[j], p.above, regions[j + 1]);
            let kind = match (p.kind, coarsest) {
                (None, _) | (Some(_), true) => {
                    if l == v && v == r {
                        None
                    } else if l == v {
                        Some(CutKind::Left)
                    } else if v == r {
                        Some(CutKind::Right)
                    } else {
                        Some(CutKind::Singleton)
                    }
                }
                (Some(CutKind::Left), false) if v == l => Some(CutKind::Left),
                (Some(CutKind::Right), false) if v == r => Some(CutKind::Right),
                (Some(_), false) => Some(CutKind::Singleton),
            };
            match kind {
                None => {}
                Some(CutKind::Singleton) => {
                    cuts.push(Cut::new(p.at, CutKind::Singleton));
                    above.push(v);
                    above.push(r);
                }
                Some(k) => {
                    cuts.push(Cut::new(p.at, k));
                    above.push(r);
                }
            }
        }
        Split { partition: Partition::from_sorted_cuts(cuts), above }
    }

    /// The 0/1 function `1[f(x) ≥ 1/2]` on its coarsest partition.
    pub fn classifier(&self) -> PiecewisePoly {
        let s = self.split_at(&Rat::new(1, 2), true);
        let polys = s.above.iter().map(|&a| if a { Poly::one() } else { Poly::zero() }).collect();
        PiecewisePoly { partition: s.partition, polys }
    }

    /// Number of maximal intervals on which the classifier is constant.
    pub fn crossing_number(&self) -> usize {
        self.split_at(&Rat::new(1, 2), true).above.len()
    }

    /// Compare the classifiers of `self` (as f) and `g`.
    pub fn disagreement(&self, g: &PiecewisePoly) -> CrossingReport {
        self.classified().disagreement(g)
    }

    /// The classifier's pieces, kept for repeated comparisons.
    pub fn classified(&self) -> Classified {
        Classified(self.split_at(&Rat::new(1, 2), true))
    }
}

/// The coarsest partition on which `1[f ≥ 1/2]` is constant, with the value
/// on each piece.
pub struct Classified(Split);

impl Classified {
    pub fn crossing_number(&self) -> usize {
        self.0.above.len()
    }

    /// [`PiecewisePoly::disagreement`] with the split of f computed once.
    pub fn disagreement(&self, g: &PiecewisePoly) -> CrossingReport {
        let f = &self.0;
        let gs = g.split_at(&Rat::new(1, 2), true);
        let (b, maps) = Partition::refine_with_maps(&[&f.partition, &gs.partition]);
        let mut agrees = vec![false; f.above.len()];
        for i in 0..b.len() {
            let u = maps[0][i];
            if f.above[u] == gs.above[maps[1][i]] {
                agrees[u] = true;
            }
        }
        CrossingReport {
            s_f: f.above.len(),
            s_g: gs.above.len(),
            disagree: agrees.iter().filter(|a| !**a).count(),
        }
    }
}

/// Crossing numbers of f and g and the number of pieces of f's classifier
/// on which g's classifier disagrees everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub s_f: usize,
    pub s_g: usize,
    pub disagree: usize,
}

impl CrossingReport {
    /// `disagree / s_f ≥ (1 − 2 s_g / s_f) / 2`, compared exactly.
    pub fn satisfies_bound(&self) -> bool {
        2 * self.disagree as i128 >= self.s_f as i128 - 2 * self.s_g as i128
    }

    /// The right-hand side `(1 − 2 s_g / s_f) / 2` as a rational.
    pub fn bound(&self) -> Rat {
        (Rat::one() - Rat::new(2 * self.s_g as i64, self.s_f as i64)) / Rat::from_int(2)
    }
}
