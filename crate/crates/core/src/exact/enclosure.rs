use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::Rat;

/// Bits of absolute precision kept by transcendental functions and outward rounding.
const PREC_BITS: u64 = 128;

/// A certified pair of rational bounds `low <= x <= high`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    pub low: Rat,
    pub high: Rat,
    /// Set when the bounds coincide because the value was computed exactly.
    pub exact: bool,
}

fn pow2(bits: u64) -> Rat {
    Rat::from_bigint(BigInt::one() << bits)
}

fn round_down(x: &Rat, bits: u64) -> Rat {
    if x.is_integer() {
        return x.clone();
    }
    let s = pow2(bits);
    (x * &s).floor() / s
}

fn round_up(x: &Rat, bits: u64) -> Rat {
    if x.is_integer() {
        return x.clone();
    }
    let s = pow2(bits);
    (x * &s).ceil() / s
}

impl Enclosure {
    pub fn exact(x: Rat) -> Enclosure {
        Enclosure { low: x.clone(), high: x, exact: true }
    }

    pub fn new(low: Rat, high: Rat) -> Enclosure {
        debug_assert!(low <= high);
        Enclosure { low, high, exact: false }
    }

    pub fn from_int(n: i64) -> Enclosure {
        Enclosure::exact(Rat::from_int(n))
    }

    pub fn width(&self) -> Rat {
        &self.high - &self.low
    }

    pub fn midpoint(&self) -> Rat {
        Rat::midpoint(&self.low, &self.high)
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.low <= x && x <= &self.high
    }

    /// The exact value, if known.
    pub fn value(&self) -> Option<&Rat> {
        if self.exact {
            Some(&self.low)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    /// Round the bounds outward onto the dyadic grid `2^-bits`, keeping
    /// exact values untouched.
    pub fn rounded(&self) -> Enclosure {
        if self.exact {
            return self.clone();
        }
        Enclosure::new(round_down(&self.low, PREC_BITS), round_up(&self.high, PREC_BITS))
    }

    pub fn scale(&self, c: &Rat) -> Enclosure {
        let a = &self.low * c;
        let b = &self.high * c;
        let mut out = if a <= b { Enclosure::new(a, b) } else { Enclosure::new(b, a) };
        out.exact = self.exact;
        out
    }

    pub fn recip(&self) -> Enclosure {
        assert!(self.low.is_positive() || self.high.is_negative(), "reciprocal of an enclosure containing 0");
        Enclosure { low: self.high.recip(), high: self.low.recip(), exact: self.exact }
    }

    pub fn div(&self, other: &Enclosure) -> Enclosure {
        self * &other.recip()
    }

    pub fn powi(&self, e: u32) -> Enclosure {
        let mut acc = Enclosure::from_int(1);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = (&acc * &base).rounded();
            }
            e >>= 1;
            if e > 0 {
                base = (&base * &base).rounded();
            }
        }
        acc
    }

    /// Square root of a nonnegative enclosure.
    pub fn sqrt(&self) -> Enclosure {
        assert!(!self.low.is_negative(), "square root of a negative enclosure");
        let lo = sqrt_bound(&self.low, false);
        let hi = sqrt_bound(&self.high, true);
        let exact = self.exact && lo == hi;
        Enclosure { low: lo, high: hi, exact }
    }

    /// Natural logarithm of a positive enclosure.
    pub fn ln(&self) -> Enclosure {
        assert!(self.low.is_positive(), "logarithm of a non-positive enclosure");
        if self.exact && self.low.is_one() {
            return Enclosure::exact(Rat::zero());
        }
        let lo = ln_rat(&self.low).low;
        let hi = ln_rat(&self.high).high;
        Enclosure::new(lo, hi)
    }

    pub fn exp(&self) -> Enclosure {
        if self.exact && self.low.is_zero() {
            return Enclosure::exact(Rat::one());
        }
        Enclosure::new(exp_rat(&self.low).low, exp_rat(&self.high).high)
    }

    /// Euler's number.
    pub fn e() -> Enclosure {
        static E: std::sync::OnceLock<Enclosure> = std::sync::OnceLock::new();
        E.get_or_init(|| exp_rat(&Rat::one())).clone()
    }

    pub fn max(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            low: std::cmp::max(&self.low, &other.low).clone(),
            high: std::cmp::max(&self.high, &other.high).clone(),
            exact: self.exact && other.exact,
        }
    }

    /// Smallest integer `n` with `n >= x` for every `x` in the enclosure.
    pub fn ceil_upper(&self) -> BigInt {
        self.high.ceil().to_bigint().expect("integer")
    }

    /// True when every value in the enclosure is `>= x`.
    pub fn certainly_ge(&self, x: &Rat) -> bool {
        &self.low >= x
    }

    /// True when every value in the enclosure is `<= x`.
    pub fn certainly_le(&self, x: &Rat) -> bool {
        &self.high <= x
    }
}

fn sqrt_bound(x: &Rat, upper: bool) -> Rat {
    if x.is_zero() {
        return Rat::zero();
    }
    // sqrt(n/d) = sqrt(n d) / d
    let n = x.numer();
    let d = x.denom();
    let scaled: BigInt = &n * &d * (BigInt::one() << (2 * PREC_BITS));
    let mut r = scaled.sqrt();
    let exact = &r * &r == scaled;
    if upper && !exact {
        r += 1;
    }
    Rat::from_bigint(r) / (Rat::from_bigint(d) * pow2(PREC_BITS))
}

/// `atanh(u)` for `0 <= u <= 1/2` as an enclosure.
fn atanh_series(u: &Rat) -> Enclosure {
    if u.is_zero() {
        return Enclosure::exact(Rat::zero());
    }
    let u2 = u * u;
    let eps = pow2(PREC_BITS + 4).recip();
    let mut term = u.clone();
    let mut sum = Rat::zero();
    let mut k: i64 = 0;
    loop {
        sum += &term / Rat::from_int(2 * k + 1);
        sum = round_down(&sum, PREC_BITS + 16);
        term = round_down(&(&term * &u2), PREC_BITS + 16);
        k += 1;
        // tail bound: term / ((2k+1)(1-u^2)), plus accumulated rounding
        let tail = &term / (Rat::from_int(2 * k + 1) * (Rat::one() - &u2));
        if tail < eps {
            let slack = &tail + Rat::from_int(2 * k + 4) * pow2(PREC_BITS + 16).recip();
            return Enclosure::new(&sum - &slack, &sum + &slack);
        }
    }
}

fn ln2() -> &'static Enclosure {
    static LN2: std::sync::OnceLock<Enclosure> = std::sync::OnceLock::new();
    LN2.get_or_init(|| atanh_series(&Rat::new(1, 3)).scale(&Rat::from_int(2)))
}

/// Natural logarithm of a positive rational.
fn ln_rat(x: &Rat) -> Enclosure {
    if x.is_one() {
        return Enclosure::exact(Rat::zero());
    }
    // reduce x = 2^k y with y in [2/3, 4/3), jumping by bit lengths first
    let two = Rat::from_int(2);
    let mut k: i64 = x.numer().bits() as i64 - x.denom().bits() as i64;
    let mut y = x * &two.pow(-k as i32);
    let lo = Rat::new(2, 3);
    let hi = Rat::new(4, 3);
    while y >= hi {
        y /= &two;
        k += 1;
    }
    while y < lo {
        y *= &two;
        k -= 1;
    }
    let u = (&y - Rat::one()) / (&y + Rat::one());
    let neg = u.is_negative();
    let mut part = atanh_series(&u.abs()).scale(&two);
    if neg {
        part = -&part;
    }
    let out = &part + &ln2().scale(&Rat::from_int(k));
    Enclosure::new(out.low, out.high).rounded()
}

/// `exp(x)` for a rational `x`.
fn exp_rat(x: &Rat) -> Enclosure {
    if x.is_zero() {
        return Enclosure::exact(Rat::one());
    }
    // halve until |y| <= 1/4, then square back
    let mut y = x.clone();
    let mut s = 0u32;
    let quarter = Rat::new(1, 4);
    while y.abs() > quarter {
        y /= Rat::from_int(2);
        s += 1;
    }
    let eps = pow2(PREC_BITS + 8 + s as u64).recip();
    let mut term = Rat::one();
    let mut sum = Rat::one();
    let mut n: i64 = 1;
    loop {
        term = round_down(&(&term * &y / Rat::from_int(n)), PREC_BITS + 32 + s as u64);
        sum += &term;
        n += 1;
        // |tail| <= 2 |term| |y| / n for |y| <= 1/4
        let tail = Rat::from_int(2) * term.abs() * y.abs() / Rat::from_int(n);
        if tail < eps {
            let slack = tail + Rat::from_int(n) * pow2(PREC_BITS + 30 + s as u64).recip();
            let mut acc = Enclosure::new(&sum - &slack, &sum + &slack).rounded();
            for _ in 0..s {
                acc = (&acc * &acc).rounded();
            }
            return acc;
        }
    }
}

impl Add<&Enclosure> for &Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: &Enclosure) -> Enclosure {
        Enclosure { low: &self.low + &rhs.low, high: &self.high + &rhs.high, exact: self.exact && rhs.exact }
    }
}

impl Sub<&Enclosure> for &Enclosure {
    type Output = Enclosure;
    fn sub(self, rhs: &Enclosure) -> Enclosure {
        Enclosure { low: &self.low - &rhs.high, high: &self.high - &rhs.low, exact: self.exact && rhs.exact }
    }
}

impl Mul<&Enclosure> for &Enclosure {
    type Output = Enclosure;
    fn mul(self, rhs: &Enclosure) -> Enclosure {
        let c = [&self.low * &rhs.low, &self.low * &rhs.high, &self.high * &rhs.low, &self.high * &rhs.high];
        let low = c.iter().min().unwrap().clone();
        let high = c.iter().max().unwrap().clone();
        Enclosure { low, high, exact: self.exact && rhs.exact }
    }
}

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure { low: -&self.high, high: -&self.low, exact: self.exact }
    }
}

impl Add for Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: Enclosure) -> Enclosure {
        &self + &rhs
    }
}

impl Sub for Enclosure {
    type Output = Enclosure;
    fn sub(self, rhs: Enclosure) -> Enclosure {
        &self - &rhs
    }
}

impl Mul for Enclosure {
    type Output = Enclosure;
    fn mul(self, rhs: Enclosure) -> Enclosure {
        &self * &rhs
    }
}

impl From<Rat> for Enclosure {
    fn from(r: Rat) -> Enclosure {
        Enclosure::exact(r)
    }
}

impl Enclosure {
    /// Exact values as a rational, others as a decimal `[low,high]` rounded
    /// outward to `places` digits, so the printed interval still contains
    /// the quantity.
    pub fn decimal(&self, places: u32) -> String {
        if self.exact {
            return self.low.to_string();
        }
        let scale = Rat::from_int(10).pow(places as i32);
        let dec = |x: Rat| {
            let n = x.to_bigint().expect("integer after rounding");
            let sign = if n.sign() == num_bigint::Sign::Minus { "-" } else { "" };
            let digits = format!("{:0>width$}", n.magnitude().to_string(), width = places as usize + 1);
            let (int, frac) = digits.split_at(digits.len() - places as usize);
            if frac.is_empty() {
                format!("{sign}{int}")
            } else {
                format!("{sign}{int}.{frac}")
            }
        };
        format!("[{},{}]", dec((&self.low * &scale).floor()), dec((&self.high * &scale).ceil()))
    }
}

impl fmt::Display for Enclosure {
    /// Exact values print as a single rational, others as `[low,high]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{}", self.low)
        } else {
            write!(f, "[{},{}]", self.low, self.high)
        }
    }
}

impl fmt::Debug for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Enclosure[{} ~ {}]", self, self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn close(e: &Enclosure, v: f64, tol: f64) -> bool {
        e.width() < Rat::new(1, 1_000_000_000_000) && (e.to_f64() - v).abs() < tol
    }

    #[test]
    fn logarithms() {
        assert!(close(&Enclosure::from_int(2).ln(), std::f64::consts::LN_2, 1e-15));
        assert!(close(&Enclosure::from_int(1000).ln(), 1000f64.ln(), 1e-12));
        assert!(close(&Enclosure::exact(rat(1, 20)).ln(), (0.05f64).ln(), 1e-14));
        assert_eq!(Enclosure::from_int(1).ln(), Enclosure::exact(Rat::zero()));
    }

    #[test]
    fn exponentials() {
        assert!(close(&Enclosure::e(), std::f64::consts::E, 1e-15));
        assert!(close(&Enclosure::exact(rat(-7, 2)).exp(), (-3.5f64).exp(), 1e-15));
        let e = Enclosure::e();
        assert!(e.low < e.high);
    }

    #[test]
    fn square_roots() {
        assert_eq!(Enclosure::exact(rat(9, 4)).sqrt(), Enclosure::exact(rat(3, 2)));
        assert!(close(&Enclosure::from_int(2).sqrt(), std::f64::consts::SQRT_2, 1e-15));
    }

    #[test]
    fn ln_exp_consistency() {
        let x = Enclosure::exact(rat(37, 10));
        let y = x.ln().exp();
        assert!(y.low <= rat(37, 10) && rat(37, 10) <= y.high);
    }

    #[test]
    fn display_forms() {
        assert_eq!(Enclosure::exact(rat(1, 2)).to_string(), "1/2");
        assert_eq!(Enclosure::new(rat(1, 3), rat(1, 2)).to_string(), "[1/3,1/2]");
    }
}
