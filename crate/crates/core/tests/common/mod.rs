//! Shared proptest strategies.
#![allow(dead_code)]

use proptest::prelude::*;
use sepcalc::gates::{DecisionTree, GateSpec, SaGate, Term};
use sepcalc::exact::isolate_roots;
use sepcalc::{AlgebraicReal, Cut, CutKind, MPoly, NetworkGraph, Node, Partition, PiecewisePoly, Poly, Rat};
use std::collections::BTreeMap;

pub fn small_rat() -> impl Strategy<Value = Rat> {
    (-8i64..=8, 1i64..=4).prop_map(|(n, d)| Rat::new(n, d))
}

pub fn sample_points(n: usize) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec((-40i64..=40, 1i64..=7), n).prop_map(|v| v.into_iter().map(|(a, b)| Rat::new(a, b)).collect())
}

pub fn poly(deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_rat(), 0..=deg + 1).prop_map(Poly::new)
}

/// At most `pieces` pieces of degree at most `deg`, cut at quarter points.
pub fn pwp(pieces: usize, deg: usize) -> impl Strategy<Value = PiecewisePoly> {
    let cut = (-8i64..=8, 0u8..3);
    prop::collection::vec(cut, 0..pieces).prop_flat_map(move |raw| {
        let mut pts: Vec<(i64, u8)> = raw;
        pts.sort();
        pts.dedup_by_key(|p| p.0);
        let mut cuts = Vec::new();
        let mut count = 1;
        for (n, k) in pts {
            let kind = [CutKind::Left, CutKind::Right, CutKind::Singleton][k as usize];
            let add = if kind == CutKind::Singleton { 2 } else { 1 };
            if count + add <= pieces {
                count += add;
                cuts.push(Cut::new(Rat::new(n, 4).into(), kind));
            }
        }
        let part = Partition::from_cuts(cuts).unwrap();
        prop::collection::vec(poly(deg), count).prop_map(move |polys| PiecewisePoly::new(part.clone(), polys).unwrap())
    })
}

/// A polynomial in `k` inputs of total degree at most `deg`.
pub fn mpoly(k: usize, deg: usize) -> impl Strategy<Value = MPoly> {
    prop::collection::vec((small_rat(), prop::collection::vec(0u32..=deg as u32, k)), 1..=3).prop_map(move |terms| {
        terms.into_iter().fold(MPoly::zero(), |acc, (c, exps)| {
            if exps.iter().sum::<u32>() as usize > deg {
                return acc;
            }
            let mono = exps.iter().enumerate().fold(MPoly::constant(c), |m, (i, &e)| &m * &MPoly::input(i as u32).pow(e));
            &acc + &mono
        })
    })
}

pub fn nonzero_rat() -> impl Strategy<Value = Rat> {
    (1i64..=8, 1i64..=4, any::<bool>()).prop_map(|(n, d, neg)| Rat::new(if neg { -n } else { n }, d))
}

/// `a·v + b` with every input weight nonzero.
pub fn affine(k: usize) -> impl Strategy<Value = MPoly> {
    (prop::collection::vec(nonzero_rat(), k), small_rat()).prop_map(|(a, b)| MPoly::affine(&a, &b))
}

/// A random gate on `k` inputs with at most `s` predicates of degree `alpha`
/// and terms of degree `beta`.
pub fn sa_gate(k: usize, s: usize, alpha: usize, beta: usize) -> impl Strategy<Value = SaGate> {
    prop::collection::vec(mpoly(k, alpha), 0..=s).prop_flat_map(move |preds| {
        let n = preds.len();
        let term = (prop::collection::vec(0u8..3, n), mpoly(k, beta)).prop_map(|(sel, poly)| {
            let lower = sel.iter().enumerate().filter(|(_, s)| **s == 1).map(|(i, _)| i).collect();
            let upper = sel.iter().enumerate().filter(|(_, s)| **s == 2).map(|(i, _)| i).collect();
            Term::new(lower, upper, poly)
        });
        prop::collection::vec(term, 1..=3).prop_map(move |terms| SaGate::new(k, preds.clone(), terms).unwrap())
    })
}

pub fn tree(k: usize, depth: u32) -> impl Strategy<Value = DecisionTree> {
    let leaf = small_rat().prop_map(DecisionTree::leaf);
    leaf.prop_recursive(depth, 7, 2, move |inner| {
        (prop::collection::vec(nonzero_rat(), k), small_rat(), inner.clone(), inner)
            .prop_map(|(a, b, l, r)| DecisionTree::split(a, b, l, r))
    })
}

/// Any gate kind on `k` inputs, with affine arguments where the kind takes
/// polynomials so compiled degrees stay small.
pub fn gate_spec(k: usize) -> impl Strategy<Value = GateSpec> {
    let affine = move || affine(k);
    prop_oneof![
        3 => (prop::collection::vec(nonzero_rat(), k), small_rat()).prop_map(move |(a, b)| GateSpec::relu_rat(&a, &b)),
        1 => prop::collection::vec(affine(), 1..=3).prop_map(|ps| GateSpec::Max { ps }),
        1 => prop::collection::vec(affine(), 1..=3).prop_map(|ps| GateSpec::Min { ps }),
        1 => (pwp(4, 2), affine()).prop_map(|(sigma, q)| GateSpec::Polyact { sigma, q }),
        1 => tree(k, 2).prop_map(|tree| GateSpec::Dt { tree }),
        1 => prop::collection::vec((small_rat(), tree(k, 1)), 1..=3)
            .prop_map(|wt| { let (weights, trees) = wt.into_iter().unzip(); GateSpec::Bdt { weights, trees } }),
        1 => (prop::collection::vec(affine(), 1..=2), prop::collection::vec(mpoly(k, 2), 2))
            .prop_map(move |(preds, polys)| {
                let terms = if preds.len() == 1 {
                    vec![Term::new(vec![0], vec![], polys[0].clone()), Term::new(vec![], vec![0], polys[1].clone())]
                } else {
                    vec![Term::new(vec![0], vec![1], polys[0].clone()), Term::new(vec![], vec![0], polys[1].clone())]
                };
                SaGate::new(k, preds, terms).unwrap()
            })
            .prop_map(|g| GateSpec::Sa { preds: g.preds().to_vec(), terms: g.terms().to_vec() }),
    ]
}

/// Small nets with mixed gates; parents are drawn from any earlier layer,
/// so skip connections occur.
pub fn network(dim: usize) -> impl Strategy<Value = NetworkGraph> {
    prop::collection::vec(1usize..=2, 1..=3)
        .prop_flat_map(move |mut widths| {
            *widths.last_mut().unwrap() = 1;
            let mut avail = vec![dim];
            let mut nodes = Vec::new();
            for (li, &w) in widths.iter().enumerate() {
                let below: Vec<(usize, usize)> = avail.iter().enumerate().flat_map(|(l, &n)| (0..n).map(move |i| (l, i))).collect();
                let prev: Vec<(usize, usize)> = (0..avail[li]).map(|i| (li, i)).collect();
                for _ in 0..w {
                    let below = below.clone();
                    let prev = prev.clone();
                    // one parent from the layer just below, at most one more from anywhere
                    let node = (prop::sample::select(prev), prop::option::of(prop::sample::select(below))).prop_flat_map(|(p, extra)| {
                        let mut parents = vec![p];
                        if let Some(e) = extra.filter(|e| *e != p) {
                            parents.push(e);
                        }
                        gate_spec(parents.len()).prop_map(move |g| Node::new(g, parents.clone()))
                    });
                    nodes.push((li, node));
                }
                avail.push(w);
            }
            let layers = nodes.iter().map(|n| n.0).collect::<Vec<_>>();
            nodes.into_iter().map(|n| n.1).collect::<Vec<_>>().prop_map(move |ns| {
                let mut out: Vec<Vec<Node>> = vec![Vec::new(); layers.iter().max().unwrap() + 1];
                for (l, n) in layers.iter().zip(ns) {
                    out[*l].push(n);
                }
                out
            })
        })
        .prop_map(move |layers| NetworkGraph::new(dim, BTreeMap::new(), layers).unwrap())
}

pub fn algebraic_point(code: (i64, bool)) -> AlgebraicReal {
    let (n, irrational) = code;
    if irrational {
        // the positive root of x² − (n² + 1)/4, strictly between two quarters
        let c = Rat::new(n * n + 1, 4);
        let p = Poly::new(vec![-c, Rat::zero(), Rat::one()]);
        isolate_roots(&p, Some(&Rat::zero()), None).unwrap().remove(0)
    } else {
        Rat::new(n, 4).into()
    }
}

fn cut_kind(k: u8) -> CutKind {
    [CutKind::Left, CutKind::Right, CutKind::Singleton][k as usize % 3]
}

/// Up to 4 partitions of at most 5 pieces each.
pub fn partition_family() -> impl Strategy<Value = Vec<Partition>> {
    let cut = (0i64..12, any::<bool>(), 0u8..3);
    prop::collection::vec(prop::collection::vec(cut, 0..3), 1..=4).prop_map(|raw| {
        raw.into_iter()
            .map(|cuts| {
                let mut pts: Vec<(AlgebraicReal, CutKind)> = cuts.into_iter().map(|(n, irr, k)| (algebraic_point((n, irr)), cut_kind(k))).collect();
                pts.sort_by(|a, b| a.0.cmp(&b.0));
                pts.dedup_by(|a, b| a.0 == b.0);
                // a singleton cut adds two pieces
                let mut out = Vec::new();
                let mut pieces = 1;
                for (at, k) in pts {
                    let add = if k == CutKind::Singleton { 2 } else { 1 };
                    if pieces + add <= 5 {
                        pieces += add;
                        out.push(Cut::new(at, k));
                    }
                }
                Partition::from_cuts(out).unwrap()
            })
            .collect()
    })
}

pub fn partition_samples() -> impl Strategy<Value = Vec<AlgebraicReal>> {
    prop::collection::vec((-2i64..16, any::<bool>()), 20).prop_map(|v| v.into_iter().map(algebraic_point).collect())
}

