//! Property tests for the exact layer: root counts against an independent
//! Sturm oracle, composition associativity, integral monotonicity and the
//! stability of algebraic comparisons under refinement.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use sepcalc::exact::{integrate_abs, isolate_roots};
use sepcalc::{AlgebraicReal, Poly, Rat};

// ---- oracle: textbook Sturm sequence on num-rational vectors ----

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn trim(mut v: Vec<Q>) -> Vec<Q> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn q_rem(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db && !r.is_empty() {
        let c = r.last().unwrap() / b.last().unwrap();
        let shift = r.len() - 1 - db;
        for (j, bc) in b.iter().enumerate() {
            r[shift + j] = &r[shift + j] - &c * bc;
        }
        r = trim(r);
    }
    r
}

fn q_eval(p: &[Q], x: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

fn oracle_count(p: &[Q], a: &Q, b: &Q) -> usize {
    let d: Vec<Q> = p.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect();
    let mut seq = vec![p.to_vec(), trim(d)];
    while !seq.last().unwrap().is_empty() {
        let n = seq.len();
        let r: Vec<Q> = q_rem(&seq[n - 2], &seq[n - 1]).into_iter().map(|c| -c).collect();
        if r.is_empty() {
            break;
        }
        seq.push(r);
    }
    let var = |x: &Q| {
        let signs: Vec<i32> = seq
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| {
                let v = q_eval(s, x);
                if v.is_positive() {
                    1
                } else if v.is_negative() {
                    -1
                } else {
                    0
                }
            })
            .filter(|s| *s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    // Sturm counts distinct roots in (a, b]; add a itself when it is a root
    let mut n = var(a) - var(b);
    if q_eval(p, a).is_zero() {
        n += 1;
    }
    n
}

fn poly_strategy(max_deg: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-10i64..=10, 1..=max_deg + 1)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, ..ProptestConfig::default() })]

    #[test]
    fn root_counts_match_sturm_oracle(coeffs in poly_strategy(6), a in -40i64..40, len in 1i64..60, den in 1i64..8) {
        let p = Poly::from_ints(&coeffs);
        prop_assume!(!p.is_zero());
        let lo = Rat::new(a, den);
        let hi = Rat::new(a + len, den);
        let roots = isolate_roots(&p, Some(&lo), Some(&hi)).unwrap();
        let qp: Vec<Q> = trim(coeffs.iter().map(|&c| q(c)).collect());
        let expected = if qp.len() == 1 {
            0
        } else {
            oracle_count(&qp, &Q::new(BigInt::from(a), BigInt::from(den)), &Q::new(BigInt::from(a + len), BigInt::from(den)))
        };
        prop_assert_eq!(roots.len(), expected);
        prop_assert!(roots.len() <= p.degree().unwrap());
        for w in roots.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        for r in &roots {
            prop_assert_eq!(r.sign_of_poly(&p), 0);
            if let Some(x) = r.as_rational() {
                prop_assert!(p.eval(x).is_zero());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn composition_is_associative(p in poly_strategy(3), q2 in poly_strategy(3), r in poly_strategy(3)) {
        let (p, q2, r) = (Poly::from_ints(&p), Poly::from_ints(&q2), Poly::from_ints(&r));
        prop_assert_eq!(p.compose(&q2).compose(&r), p.compose(&q2.compose(&r)));
    }

    #[test]
    fn algebraic_order_is_stable_under_refinement(a in poly_strategy(4), b in poly_strategy(4), i in 0usize..4, j in 0usize..4, steps in 1usize..12) {
        let pa = Poly::from_ints(&a);
        let pb = Poly::from_ints(&b);
        prop_assume!(!pa.is_zero() && !pb.is_zero());
        let ra = isolate_roots(&pa, None, None).unwrap();
        let rb = isolate_roots(&pb, None, None).unwrap();
        prop_assume!(!ra.is_empty() && !rb.is_empty());
        let x = ra[i % ra.len()].clone();
        let y = rb[j % rb.len()].clone();
        let before = x.cmp(&y);
        let mut xr = x.clone();
        let mut yr = y.clone();
        for _ in 0..steps {
            xr = xr.bisected();
        }
        for _ in 0..(steps / 2) {
            yr = yr.bisected();
        }
        prop_assert_eq!(xr.cmp(&yr), before);
        prop_assert_eq!(yr.cmp(&xr), before.reverse());
        // floating sanity check, only when clearly separated
        if (x.to_f64() - y.to_f64()).abs() > 1e-9 {
            prop_assert_eq!(x.to_f64().partial_cmp(&y.to_f64()).unwrap(), before);
        }
    }

    #[test]
    fn integral_enclosures_shrink_with_width(c in poly_strategy(4), lo in -6i64..0, hi in 1i64..6) {
        let p = Poly::from_ints(&c);
        let a = AlgebraicReal::from(Rat::new(lo, 2));
        let b = AlgebraicReal::from(Rat::new(hi, 3));
        let mut prev = integrate_abs(&p, &a, &b, &Rat::new(1, 10)).unwrap();
        for k in 2..6 {
            let w = Rat::new(1, 10i64.pow(k));
            let next = integrate_abs(&p, &a, &b, &w).unwrap();
            prop_assert!(next.low >= prev.low && next.high <= prev.high);
            prop_assert!(next.width() <= w);
            prev = next;
        }
    }
}

#[test]
fn integral_matches_quadrature() {
    // 4x(1-x) - 1/2 on [0,1]; fine midpoint rule as an independent check
    let p = Poly::new(vec![Rat::new(-1, 2), Rat::from_int(4), Rat::from_int(-4)]);
    let e = integrate_abs(&p, &AlgebraicReal::zero(), &AlgebraicReal::from(Rat::one()), &Rat::new(1, 1_000_000)).unwrap();
    let n = 200_000;
    let h = 1.0 / n as f64;
    let quad: f64 = (0..n)
        .map(|i| {
            let x = (i as f64 + 0.5) * h;
            (4.0 * x * (1.0 - x) - 0.5).abs() * h
        })
        .sum();
    assert!(e.low.to_f64() - 1e-6 <= quad && quad <= e.high.to_f64() + 1e-6);
    assert!((e.to_f64() - 0.30473785).abs() < 1e-6);
}
