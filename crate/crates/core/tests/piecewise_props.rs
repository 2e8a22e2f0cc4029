//! Gate application, crossing numbers, classifier disagreement and L¹
//! distances on random piecewise polynomials.

mod common;

use common::{pwp, sa_gate, sample_points};
use proptest::prelude::*;
use sepcalc::piecewise::{l1_distance, LinearL1};
use sepcalc::{PiecewisePoly, Rat};
use std::collections::BTreeMap;

fn gate_case() -> impl Strategy<Value = (sepcalc::gates::SaGate, Vec<PiecewisePoly>)> {
    (1usize..=3, 1usize..=3, 1usize..=2, 1usize..=2, 1usize..=3, 0usize..=2).prop_flat_map(|(k, s, alpha, beta, t, gamma)| {
        (sa_gate(k, s, alpha, beta), prop::collection::vec(pwp(t, gamma), k))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn applied_gate_respects_piece_and_degree_bounds((gate, gs) in gate_case(), xs in sample_points(10)) {
        let refs: Vec<&PiecewisePoly> = gs.iter().collect();
        let h = PiecewisePoly::apply_gate(&gate, &refs).unwrap();
        let prof = gate.profile();
        let (t, gamma) = (gs.iter().map(PiecewisePoly::len).max().unwrap(), gs.iter().map(PiecewisePoly::degree).max().unwrap());
        let k = gs.len();
        let piece_bound = prof.t.max(1) * t * k * (1 + prof.alpha * gamma);
        prop_assert!(h.len() <= piece_bound, "{} pieces > {}", h.len(), piece_bound);
        prop_assert!(h.degree() <= prof.beta * gamma.max(1));
        for x in &xs {
            let v: Vec<Rat> = gs.iter().map(|g| g.eval_rat(x)).collect();
            prop_assert_eq!(h.eval_rat(x), gate.eval(&v, &BTreeMap::new()).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn crossings_bounded_by_pieces_and_degree(f in (1usize..=5, 0usize..=3).prop_flat_map(|(t, a)| pwp(t, a))) {
        prop_assert!(f.crossing_number() <= f.len() * (1 + f.degree()));
    }

    #[test]
    fn disagreement_bound_holds(f in pwp(6, 1), g in pwp(6, 1)) {
        let r = f.disagreement(&g);
        prop_assert!(r.satisfies_bound());
        prop_assert_eq!(r.s_f, f.crossing_number());
        prop_assert_eq!(r.s_g, g.crossing_number());
    }

    #[test]
    fn classifier_is_idempotent(f in pwp(5, 2)) {
        let c = f.classifier();
        prop_assert_eq!(c.classifier(), c.clone());
        prop_assert_eq!(c.crossing_number(), f.crossing_number());
    }
}

fn overlap(a: &sepcalc::Enclosure, b: &sepcalc::Enclosure) -> bool {
    a.low <= b.high && b.low <= a.high
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn l1_symmetric_and_triangular(f in pwp(4, 2), g in pwp(4, 2), h in pwp(4, 1)) {
        let (lo, hi, w) = (Rat::new(-2, 1), Rat::new(2, 1), Rat::new(1, 1 << 20));
        let fg = l1_distance(&f, &g, &lo, &hi, &w).unwrap();
        let gf = l1_distance(&g, &f, &lo, &hi, &w).unwrap();
        prop_assert!(overlap(&fg, &gf));
        prop_assert!(fg.width() <= w && !fg.low.is_negative());
        let fh = l1_distance(&f, &h, &lo, &hi, &w).unwrap();
        let gh = l1_distance(&g, &h, &lo, &hi, &w).unwrap();
        prop_assert!(fh.low <= &fg.high + &gh.high);
        prop_assert!(l1_distance(&f, &f, &lo, &hi, &w).unwrap().high.is_zero());
    }

    #[test]
    fn fast_l1_matches_general(f in pwp(6, 1), g in pwp(4, 2)) {
        let (lo, hi, w) = (Rat::zero(), Rat::one(), Rat::new(1, 1 << 20));
        let fast = LinearL1::new(&f, &lo, &hi).unwrap().expect("piecewise-linear target");
        let a = fast.distance(&g, &w).unwrap();
        let b = l1_distance(&f, &g, &lo, &hi, &w).unwrap();
        prop_assert!(overlap(&a, &b), "{} vs {}", a, b);
    }
}
