//! Real root isolation with Sturm sequences over exact rationals.

use super::{AlgebraicReal, Poly, Rat};
use crate::{Error, Result};

/// Scale by a positive constant to integer coefficients, keeping signs.
fn normalize_positive(p: &Poly) -> Poly {
    let q = p.primitive();
    if p.lc().is_negative() {
        -q
    } else {
        q
    }
}

/// The Sturm sequence `p, p', -rem(p, p'), ...`, each term scaled by a
/// positive constant.
pub fn sturm_sequence(p: &Poly) -> Vec<Poly> {
    let mut seq = vec![normalize_positive(p)];
    if p.is_constant() {
        return seq;
    }
    seq.push(normalize_positive(&p.derivative()));
    loop {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(normalize_positive(&-&r));
    }
    seq
}

fn count_changes(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut changes = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

/// Sign variations of the sequence at `x`; `None` means `-inf` when
/// `upper` is false and `+inf` when it is true.
fn variations(seq: &[Poly], x: Option<&Rat>, upper: bool) -> usize {
    match x {
        Some(x) => count_changes(seq.iter().map(|q| q.sign_at(x))),
        None => count_changes(seq.iter().map(|q| {
            let s = q.lc().signum();
            let d = q.degree_or_zero();
            if upper || d % 2 == 0 {
                s
            } else {
                -s
            }
        })),
    }
}

/// Number of distinct real roots in `(lo, hi]` of the polynomial whose Sturm
/// sequence is `seq`. `None` bounds stand for `-inf` and `+inf`.
pub fn sturm_count(seq: &[Poly], lo: Option<&Rat>, hi: Option<&Rat>) -> usize {
    let a = variations(seq, lo, false);
    let b = variations(seq, hi, true);
    a.saturating_sub(b)
}

/// Divide out the linear factor of the rational root `r`, keeping the result primitive.
fn deflate(q: &Poly, r: &Rat) -> Poly {
    let (quot, rem) = q.div_rem(&Poly::linear(-r, Rat::one()));
    debug_assert!(rem.is_zero());
    quot.primitive()
}

struct Isolator {
    q: Poly,
    seq: Vec<Poly>,
    rational: Vec<Rat>,
}

impl Isolator {
    fn new(q: Poly) -> Isolator {
        let seq = sturm_sequence(&q);
        Isolator { q, seq, rational: Vec::new() }
    }

    fn take_rational(&mut self, r: Rat) {
        self.q = deflate(&self.q, &r);
        self.seq = sturm_sequence(&self.q);
        self.rational.push(r);
    }

    /// Isolate all roots in the open interval `(a, b)`, whose endpoints are
    /// not roots of the current polynomial.
    fn isolate(&mut self, a: Rat, b: Rat) -> Vec<(Rat, Rat)> {
        let mut out = Vec::new();
        let mut stack = vec![(a, b)];
        while let Some((lo, hi)) = stack.pop() {
            if self.q.is_constant() {
                break;
            }
            let n = sturm_count(&self.seq, Some(&lo), Some(&hi));
            match n {
                0 => {}
                1 => out.push((lo, hi)),
                _ => {
                    let mid = Rat::midpoint(&lo, &hi);
                    if self.q.eval(&mid).is_zero() {
                        self.take_rational(mid.clone());
                    }
                    stack.push((mid.clone(), hi));
                    stack.push((lo, mid));
                }
            }
        }
        out
    }

    /// Shrink an isolating interval until it either exposes a rational root
    /// or is too narrow to contain one.
    fn classify(&mut self, mut lo: Rat, mut hi: Rat) -> Option<(Rat, Rat)> {
        if self.q.degree() == Some(1) {
            let c = self.q.coeffs();
            let r = -(&c[0] / &c[1]);
            if lo < r && r < hi {
                self.take_rational(r);
                return None;
            }
        }
        let lc = self.q.lc();
        let limit = (&lc * &lc).recip();
        let lo_sign = self.q.sign_at(&lo);
        while &hi - &lo >= limit {
            let mid = Rat::midpoint(&lo, &hi);
            let s = self.q.sign_at(&mid);
            if s == 0 {
                self.take_rational(mid);
                return None;
            }
            if s == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let candidate = Rat::simplest_between(&lo, &hi);
        if self.q.eval(&candidate).is_zero() {
            self.take_rational(candidate);
            return None;
        }
        Some((lo, hi))
    }
}

/// All real roots of `p` lying in the closed window `[lo, hi]` (missing bounds
/// are infinite), ascending and without multiplicity.
pub fn isolate_roots(p: &Poly, lo: Option<&Rat>, hi: Option<&Rat>) -> Result<Vec<AlgebraicReal>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if let (Some(a), Some(b)) = (lo, hi) {
        if a > b {
            return Err(Error::EmptyInterval(format!("[{a}, {b}]")));
        }
    }
    let q = p.square_free();
    if q.is_constant() {
        return Ok(Vec::new());
    }
    if q.degree() == Some(1) {
        let c = q.coeffs();
        let r = -(&c[0] / &c[1]);
        let inside = lo.is_none_or(|a| a <= &r) && hi.is_none_or(|b| &r <= b);
        return Ok(if inside { vec![AlgebraicReal::from(r)] } else { Vec::new() });
    }
    let mut iso = Isolator::new(q);
    let bound = iso.q.cauchy_bound();
    let mut a = match lo {
        Some(a) => a.clone(),
        None => -&bound,
    };
    let mut b = match hi {
        Some(b) => b.clone(),
        None => bound.clone(),
    };
    if a == b {
        return Ok(if iso.q.eval(&a).is_zero() { vec![AlgebraicReal::from(a)] } else { Vec::new() });
    }
    if iso.q.eval(&a).is_zero() {
        iso.take_rational(a.clone());
    }
    if iso.q.eval(&b).is_zero() {
        iso.take_rational(b.clone());
    }
    // the window may be wider than needed; clamp to the root bound
    if a < -&bound {
        a = -&bound;
    }
    if b > bound {
        b = bound;
    }
    let mut intervals = Vec::new();
    if a < b {
        intervals = iso.isolate(a, b);
    }
    let mut algebraic = Vec::new();
    for (l, h) in intervals {
        if let Some(iv) = iso.classify(l, h) {
            algebraic.push(iv);
        }
    }
    let defining = iso.q.clone();
    let mut out: Vec<AlgebraicReal> = iso.rational.into_iter().map(AlgebraicReal::from).collect();
    for (l, h) in algebraic {
        out.push(AlgebraicReal::from_isolating(defining.clone(), l, h));
    }
    out.sort();
    Ok(out)
}

/// All real roots of `p`, ascending.
pub fn isolate_real_roots(p: &Poly) -> Result<Vec<AlgebraicReal>> {
    isolate_roots(p, None, None)
}
