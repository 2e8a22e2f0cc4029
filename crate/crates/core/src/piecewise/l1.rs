use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::PiecewisePoly;
use crate::exact::{integrate_abs, AlgebraicReal, Enclosure, Rat};
use crate::{Error, Result};

fn check_window(lo: &Rat, hi: &Rat) -> Result<()> {
    if lo >= hi {
        return Err(Error::EmptyInterval(format!("[{lo}, {hi}]")));
    }
    Ok(())
}

/// Certified enclosure of `∫_lo^hi |f − g|`, no wider than `width`.
///
/// Exact whenever every split point is rational, in particular when `f − g`
/// is piecewise linear with rational breakpoints.
pub fn l1_distance(f: &PiecewisePoly, g: &PiecewisePoly, lo: &Rat, hi: &Rat, width: &Rat) -> Result<Enclosure> {
    if !width.is_positive() {
        return Err(Error::NonPositiveWidth);
    }
    check_window(lo, hi)?;
    let d = PiecewisePoly::linear(&[Rat::one(), -Rat::one()], &[f, g])?;
    let (alo, ahi) = (AlgebraicReal::from(lo), AlgebraicReal::from(hi));
    let mut spans = Vec::new();
    for (iv, p) in d.pieces() {
        if iv.is_singleton() {
            continue;
        }
        let a = match iv.lo {
            Some(x) if x > alo => x,
            _ => alo.clone(),
        };
        let b = match iv.hi {
            Some(x) if x < ahi => x,
            _ => ahi.clone(),
        };
        if a < b {
            spans.push((a, b, p.clone()));
        }
    }
    let each = width / &Rat::from_int(spans.len().max(1) as i64);
    let mut total = Enclosure::exact(Rat::zero());
    for (a, b, p) in &spans {
        total = &total + &integrate_abs(p, a, b, &each)?;
    }
    Ok(total)
}

/// `∫` of `|d|` over a segment of length `dx` where `d` is linear with end values `d0`, `d1`.
fn segment_abs(dx: &Rat, d0: &Rat, d1: &Rat) -> Rat {
    let (a0, a1) = (d0.abs(), d1.abs());
    if d0.signum() * d1.signum() >= 0 {
        dx * &(&a0 + &a1) / Rat::from_int(2)
    } else {
        dx * &(d0 * d0 + d1 * d1) / (Rat::from_int(2) * (&a0 + &a1))
    }
}

/// Repeated L¹ distances from a fixed piecewise-linear target on a window.
///
/// The target is flattened to integer knot positions and values over common
/// denominators, so each query against a piecewise-linear candidate runs in
/// checked 128-bit integer arithmetic. Anything outside that fast route
/// (nonlinear pieces, irrational knots, overflow) falls back to
/// [`l1_distance`].
#[derive(Clone, Debug)]
pub struct LinearL1 {
    target: PiecewisePoly,
    lo: Rat,
    hi: Rat,
    /// Segment boundaries, `xs[0] = lo`, `xs.last() = hi`.
    xs: Vec<Rat>,
    /// `xs · x_den`.
    nx: Vec<i128>,
    x_den: i128,
    /// Target values at the left and right end of each segment, times `y_den`.
    fl: Vec<i128>,
    fr: Vec<i128>,
    y_den: i128,
}

fn lcm_i128(a: i128, b: &BigInt) -> Option<i128> {
    let b = b.to_i128()?;
    let g = a.gcd(&b);
    (a / g).checked_mul(b)
}

fn scaled(x: &Rat, den: i128) -> Option<i128> {
    // x · den, exact when den is a multiple of x's denominator
    let (n, d) = x.as_small()?;
    (n as i128).checked_mul(den / d as i128)
}

impl LinearL1 {
    /// `None` when the target is not piecewise linear with rational knots on
    /// the window, or its denominators are too large.
    pub fn new(target: &PiecewisePoly, lo: &Rat, hi: &Rat) -> Result<Option<LinearL1>> {
        check_window(lo, hi)?;
        let (alo, ahi) = (AlgebraicReal::from(lo), AlgebraicReal::from(hi));
        let mut xs = vec![lo.clone()];
        let mut segs = Vec::new();
        for (iv, p) in target.pieces() {
            if iv.is_singleton() {
                continue;
            }
            let a = match &iv.lo {
                Some(x) if x > &alo => x.clone(),
                _ => alo.clone(),
            };
            let b = match &iv.hi {
                Some(x) if x < &ahi => x.clone(),
                _ => ahi.clone(),
            };
            if a >= b {
                continue;
            }
            if p.degree_or_zero() > 1 {
                return Ok(None);
            }
            let (Some(a), Some(b)) = (a.as_rational().cloned(), b.as_rational().cloned()) else {
                return Ok(None);
            };
            if xs.last() != Some(&a) {
                return Ok(None);
            }
            segs.push((p.eval(&a), p.eval(&b)));
            xs.push(b);
        }
        let mut x_den: i128 = 1;
        let mut y_den: i128 = 1;
        for x in &xs {
            match lcm_i128(x_den, &x.denom()) {
                Some(v) if v < 1 << 40 => x_den = v,
                _ => return Ok(None),
            }
        }
        for (a, b) in &segs {
            for v in [a, b] {
                match lcm_i128(y_den, &v.denom()) {
                    Some(v) if v < 1 << 40 => y_den = v,
                    _ => return Ok(None),
                }
            }
        }
        let nx: Option<Vec<i128>> = xs.iter().map(|x| scaled(x, x_den)).collect();
        let fl: Option<Vec<i128>> = segs.iter().map(|s| scaled(&s.0, y_den)).collect();
        let fr: Option<Vec<i128>> = segs.iter().map(|s| scaled(&s.1, y_den)).collect();
        let (Some(nx), Some(fl), Some(fr)) = (nx, fl, fr) else {
            return Ok(None);
        };
        if nx.iter().chain(&fl).chain(&fr).any(|v| v.abs() >= 1 << 62) {
            return Ok(None);
        }
        Ok(Some(LinearL1 { target: target.clone(), lo: lo.clone(), hi: hi.clone(), xs, nx, x_den, fl, fr, y_den }))
    }

    pub fn target(&self) -> &PiecewisePoly {
        &self.target
    }

    /// Exact `∫_lo^hi |target − g|` when `g` is piecewise linear with rational
    /// knots; otherwise an enclosure of width at most `width`.
    pub fn distance(&self, g: &PiecewisePoly, width: &Rat) -> Result<Enclosure> {
        let (alo, ahi) = (AlgebraicReal::from(&self.lo), AlgebraicReal::from(&self.hi));
        let mut total = Rat::zero();
        for (iv, p) in g.pieces() {
            if iv.is_singleton() {
                continue;
            }
            let u = match &iv.lo {
                Some(x) if x > &alo => x.clone(),
                _ => alo.clone(),
            };
            let v = match &iv.hi {
                Some(x) if x < &ahi => x.clone(),
                _ => ahi.clone(),
            };
            if u >= v {
                continue;
            }
            let (Some(u), Some(v)) = (u.as_rational(), v.as_rational()) else {
                return l1_distance(&self.target, g, &self.lo, &self.hi, width);
            };
            if p.degree_or_zero() > 1 {
                return l1_distance(&self.target, g, &self.lo, &self.hi, width);
            }
            total += self.piece_distance(u, v, &p.coeff(0), &p.coeff(1));
        }
        Ok(Enclosure::exact(total))
    }

    /// Target value on segment `j` at `x`.
    fn target_at(&self, j: usize, x: &Rat) -> Rat {
        let (x0, x1) = (&self.xs[j], &self.xs[j + 1]);
        let y0 = Rat::from_bigint(BigInt::from(self.fl[j])) / Rat::from_bigint(BigInt::from(self.y_den));
        let y1 = Rat::from_bigint(BigInt::from(self.fr[j])) / Rat::from_bigint(BigInt::from(self.y_den));
        &y0 + &((&y1 - &y0) * (x - x0) / (x1 - x0))
    }

    /// `∫_u^v |target − (c0 + c1·x)|` for `lo ≤ u < v ≤ hi`.
    fn piece_distance(&self, u: &Rat, v: &Rat, c0: &Rat, c1: &Rat) -> Rat {
        // segment containing u (from the right) and v (from the left)
        let first = self.xs.partition_point(|x| x <= u) - 1;
        let last = self.xs.partition_point(|x| x < v) - 1;
        let g = |x: &Rat| c0 + &(c1 * x);
        let exact_part = |j: usize, a: &Rat, b: &Rat| {
            segment_abs(&(b - a), &(self.target_at(j, a) - g(a)), &(self.target_at(j, b) - g(b)))
        };
        if first == last {
            return exact_part(first, u, v);
        }
        let mut out = exact_part(first, u, &self.xs[first + 1]) + exact_part(last, &self.xs[last], v);
        if first + 1 < last {
            out += match self.middle(first + 1, last, c0, c1) {
                Some(r) => r,
                None => (first + 1..last).map(|j| exact_part(j, &self.xs[j], &self.xs[j + 1])).sum(),
            };
        }
        out
    }

    /// Whole segments `j0..j1` in integer arithmetic.
    fn middle(&self, j0: usize, j1: usize, c0: &Rat, c1: &Rat) -> Option<Rat> {
        let (p0, q0) = c0.as_small()?;
        let (p1, q1) = c1.as_small()?;
        let (p0, q0, p1, q1) = (p0 as i128, q0 as i128, p1 as i128, q1 as i128);
        // d = f − g over the common denominator D = y_den·q0·q1·x_den
        let qx = q0.checked_mul(q1)?.checked_mul(self.x_den)?;
        let a = self.y_den.checked_mul(p0.checked_mul(q1)?.checked_mul(self.x_den)?)?;
        let b = self.y_den.checked_mul(p1.checked_mul(q0)?)?;
        let num = |fy: i128, n: i128| -> Option<i128> { fy.checked_mul(qx)?.checked_sub(a.checked_add(b.checked_mul(n)?)?) };
        let mut flat: i128 = 0;
        let mut crossing: HashMap<i128, i128> = HashMap::new();
        for j in j0..j1 {
            let dn = self.nx[j + 1] - self.nx[j];
            let na = num(self.fl[j], self.nx[j])?;
            let nb = num(self.fr[j], self.nx[j + 1])?;
            let s = na.checked_abs()?.checked_add(nb.checked_abs()?)?;
            if na.signum() * nb.signum() >= 0 {
                flat = flat.checked_add(dn.checked_mul(s)?)?;
            } else {
                let sq = na.checked_mul(na)?.checked_add(nb.checked_mul(nb)?)?;
                let e = crossing.entry(s).or_insert(0);
                *e = e.checked_add(dn.checked_mul(sq)?)?;
            }
        }
        let big = |v: i128| Rat::from_bigint(BigInt::from(v));
        let mut sum = big(flat);
        for (s, acc) in crossing {
            sum += big(acc) / big(s);
        }
        let denom = BigInt::from(2) * BigInt::from(self.y_den) * BigInt::from(qx) * BigInt::from(self.x_den);
        Some(sum / Rat::from_bigint(denom))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, Poly};

    fn tent() -> PiecewisePoly {
        // 2x on [0,1/2), 2-2x on [1/2,1], 0 elsewhere
        let a = PiecewisePoly::relu(&rat(2, 1), &Rat::zero());
        let b = PiecewisePoly::relu(&rat(4, 1), &rat(-2, 1));
        let c = PiecewisePoly::relu(&rat(2, 1), &rat(-2, 1));
        PiecewisePoly::linear(&[Rat::one(), -Rat::one(), Rat::one()], &[&a, &b, &c]).unwrap()
    }

    #[test]
    fn distance_to_self_is_zero() {
        let f = tent();
        let e = l1_distance(&f, &f, &Rat::zero(), &Rat::one(), &rat(1, 100)).unwrap();
        assert_eq!(e, Enclosure::exact(Rat::zero()));
    }

    #[test]
    fn tent_area() {
        let f = tent();
        let e = l1_distance(&f, &PiecewisePoly::zero(), &Rat::zero(), &Rat::one(), &rat(1, 100)).unwrap();
        assert_eq!(e, Enclosure::exact(rat(1, 2)));
        let fast = LinearL1::new(&f, &Rat::zero(), &Rat::one()).unwrap().unwrap();
        assert_eq!(fast.distance(&PiecewisePoly::zero(), &rat(1, 100)).unwrap(), Enclosure::exact(rat(1, 2)));
        let half = PiecewisePoly::constant(rat(1, 2));
        assert_eq!(fast.distance(&half, &rat(1, 100)).unwrap(), Enclosure::exact(rat(1, 4)));
    }

    #[test]
    fn fast_route_matches_general_route() {
        let f = tent();
        let fast = LinearL1::new(&f, &rat(-1, 3), &rat(5, 4)).unwrap().unwrap();
        for (a, b) in [(rat(1, 3), rat(-1, 7)), (rat(-2, 1), rat(3, 2)), (rat(5, 8), Rat::zero())] {
            let g = PiecewisePoly::relu(&a, &b);
            let slow = l1_distance(&f, &g, &rat(-1, 3), &rat(5, 4), &rat(1, 100)).unwrap();
            assert_eq!(fast.distance(&g, &rat(1, 100)).unwrap(), slow);
        }
    }

    #[test]
    fn nonlinear_falls_back() {
        let f = tent();
        let fast = LinearL1::new(&f, &Rat::zero(), &Rat::one()).unwrap().unwrap();
        let g = PiecewisePoly::from_poly(Poly::from_ints(&[0, 0, 1]));
        let w = rat(1, 1000);
        let e = fast.distance(&g, &w).unwrap();
        let direct = l1_distance(&f, &g, &Rat::zero(), &Rat::one(), &w).unwrap();
        assert_eq!(e, direct);
        assert!(LinearL1::new(&g, &Rat::zero(), &Rat::one()).unwrap().is_none());
    }

    #[test]
    fn bad_arguments() {
        let f = tent();
        assert_eq!(l1_distance(&f, &f, &Rat::zero(), &Rat::one(), &Rat::zero()).unwrap_err(), Error::NonPositiveWidth);
        assert!(l1_distance(&f, &f, &Rat::one(), &Rat::zero(), &rat(1, 2)).is_err());
    }
}
