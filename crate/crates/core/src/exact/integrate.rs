use super::{AlgebraicReal, Enclosure, Poly, Rat};
use crate::{Error, Result};

/// Certified enclosure of `∫_lo^hi |p(x)| dx` no wider than `width`.
///
/// The integrand is split at the roots of `p`; the result is exact when
/// every split point and both endpoints are rational. Algebraic points are
/// refined by a fixed bisection schedule, so a smaller `width` only ever
/// tightens the returned bounds.
pub fn integrate_abs(p: &Poly, lo: &AlgebraicReal, hi: &AlgebraicReal, width: &Rat) -> Result<Enclosure> {
    if !width.is_positive() {
        return Err(Error::NonPositiveWidth);
    }
    if lo > hi {
        return Err(Error::EmptyInterval(format!("[{lo}, {hi}]")));
    }
    if p.is_zero() || lo == hi {
        return Ok(Enclosure::exact(Rat::zero()));
    }
    // split points: endpoints plus interior roots, each with a weight on the antiderivative
    let (wlo, _) = lo.enclosure();
    let (_, whi) = hi.enclosure();
    let mut points = vec![lo.clone()];
    for r in super::isolate_roots(p, Some(&wlo), Some(&whi))? {
        if &r > lo && &r < hi {
            points.push(r);
        }
    }
    points.push(hi.clone());
    let signs: Vec<i32> = points
        .windows(2)
        .map(|w| p.sign_at(&AlgebraicReal::rational_between(&w[0], &w[1])))
        .collect();
    let n = points.len();
    let mut weights = vec![0i64; n];
    for (j, s) in signs.iter().enumerate() {
        weights[j] -= *s as i64;
        weights[j + 1] += *s as i64;
    }
    let anti = p.antiderivative();
    let mut exact_sum = Rat::zero();
    let mut pending: Vec<(i64, AlgebraicReal)> = Vec::new();
    for (w, x) in weights.into_iter().zip(points) {
        if w == 0 {
            continue;
        }
        match x.as_rational() {
            Some(r) => exact_sum += anti.eval(r) * Rat::from_int(w),
            None => pending.push((w, x)),
        }
    }
    if pending.is_empty() {
        return Ok(Enclosure::exact(exact_sum));
    }
    loop {
        let mut low = exact_sum.clone();
        let mut high = exact_sum.clone();
        for (w, x) in &pending {
            let (a, b) = x.enclosure();
            let (vl, vh) = anti.eval_range(&a, &b);
            let wr = Rat::from_int(*w);
            if *w > 0 {
                low += &vl * &wr;
                high += &vh * &wr;
            } else {
                low += &vh * &wr;
                high += &vl * &wr;
            }
        }
        if &(&high - &low) <= width {
            return Ok(Enclosure::new(low, high));
        }
        for (_, x) in pending.iter_mut() {
            *x = x.bisected();
        }
    }
}
