//! Exact rational numbers.
//!
//! Values whose reduced numerator and denominator fit in an `i64` are kept
//! inline and use 128-bit intermediates; everything else falls back to a
//! heap-allocated [`BigRational`]. The two representations are never mixed
//! for the same value, so structural equality is value equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

#[derive(Clone)]
enum Repr {
    /// Reduced, `den > 0`, `num != i64::MIN`.
    Small(i64, i64),
    Big(Box<BigRational>),
}

/// An exact, always-reduced rational number.
#[derive(Clone)]
pub struct Rat(Repr);

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    a.gcd(&b)
}

impl Rat {
    pub fn zero() -> Rat {
        Rat(Repr::Small(0, 1))
    }

    pub fn one() -> Rat {
        Rat(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Rat {
        if n == i64::MIN {
            return Rat::from_big(BigRational::from_integer(BigInt::from(n)));
        }
        Rat(Repr::Small(n, 1))
    }

    /// `num / den`. Panics when `den == 0`.
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat::from_i128(num as i128, den as i128)
    }

    /// `num / 2^exp`.
    pub fn dyadic(num: i64, exp: u32) -> Rat {
        if exp < 62 {
            Rat::new(num, 1i64 << exp)
        } else {
            Rat::from_big(BigRational::new(BigInt::from(num), BigInt::one() << exp as usize))
        }
    }

    fn from_i128(num: i128, den: i128) -> Rat {
        debug_assert!(den != 0);
        let (mut n, mut d) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        if g > 1 {
            n /= g;
            d /= g;
        }
        Rat::from_reduced_i128(n, d)
    }

    /// Caller guarantees `gcd(n, d) = 1` and `d > 0`.
    fn from_reduced_i128(n: i128, d: i128) -> Rat {
        if n > i64::MIN as i128 && n <= i64::MAX as i128 && d <= i64::MAX as i128 {
            Rat(Repr::Small(n as i64, d as i64))
        } else {
            Rat(Repr::Big(Box::new(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))))
        }
    }

    /// Normalizes a big rational, demoting it to the inline form when it fits.
    pub fn from_big(r: BigRational) -> Rat {
        // BigRational constructors keep values reduced with a positive denominator.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN {
                return Rat(Repr::Small(n, d));
            }
        }
        Rat(Repr::Big(Box::new(r)))
    }

    pub fn from_bigint(n: BigInt) -> Rat {
        Rat::from_big(BigRational::from_integer(n))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Result<Rat, Error> {
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Rat::from_big(BigRational::new(num, den)))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    /// Numerator and denominator when both fit in `i64`.
    pub fn as_small(&self) -> Option<(i64, i64)> {
        match self.0 {
            Repr::Small(n, d) => Some((n, d)),
            Repr::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(b) => match b.numer().sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn abs(&self) -> Rat {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => {
                assert!(*n != 0, "reciprocal of zero");
                if *n < 0 {
                    Rat(Repr::Small(-*d, -*n))
                } else {
                    Rat(Repr::Small(*d, *n))
                }
            }
            Repr::Big(b) => Rat::from_big(b.recip()),
        }
    }

    pub fn pow(&self, exp: i32) -> Rat {
        if exp < 0 {
            return self.recip().pow(-exp);
        }
        let mut base = self.clone();
        let mut acc = Rat::one();
        let mut e = exp as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn floor(&self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => Rat::from_int(n.div_floor(d)),
            Repr::Big(b) => Rat::from_big(b.floor()),
        }
    }

    pub fn ceil(&self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => Rat::from_int(n.div_ceil(d)),
            Repr::Big(b) => Rat::from_big(b.ceil()),
        }
    }

    /// The integer value, when this is an integer.
    pub fn to_bigint(&self) -> Option<BigInt> {
        if self.is_integer() {
            Some(self.numer())
        } else {
            None
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self.0 {
            Repr::Small(n, 1) => Some(n),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => {
                // scale to keep both parts inside f64 range
                let n = b.numer();
                let d = b.denom();
                let shift = (n.bits() as i64).max(d.bits() as i64) - 1000;
                if shift > 0 {
                    let n2: BigInt = n >> shift as usize;
                    let d2: BigInt = d >> shift as usize;
                    n2.to_f64().unwrap_or(f64::NAN) / d2.to_f64().unwrap_or(f64::NAN)
                } else {
                    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
                }
            }
        }
    }

    /// Midpoint of two rationals.
    pub fn midpoint(a: &Rat, b: &Rat) -> Rat {
        (a + b) * Rat::new(1, 2)
    }

    pub fn min<'a>(&'a self, other: &'a Rat) -> &'a Rat {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max<'a>(&'a self, other: &'a Rat) -> &'a Rat {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// The rational with the smallest denominator in `[lo, hi]` (continued-fraction descent).
    pub fn simplest_between(lo: &Rat, hi: &Rat) -> Rat {
        debug_assert!(lo <= hi);
        if !lo.is_positive() && !hi.is_negative() {
            return Rat::zero();
        }
        if hi.is_negative() {
            return -Rat::simplest_between(&-hi, &-lo);
        }
        let fl = lo.floor();
        if &fl == lo {
            return fl;
        }
        let next = &fl + Rat::one();
        if &next <= hi {
            return next;
        }
        // lo and hi share the integer part fl and lo is not an integer
        let inner = Rat::simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
        fl + inner.recip()
    }

    fn cmp_small(a: i64, b: i64, c: i64, d: i64) -> Ordering {
        if b == d {
            return a.cmp(&c);
        }
        (a as i128 * d as i128).cmp(&(c as i128 * b as i128))
    }
}

fn add_small(a: i64, b: i64, c: i64, d: i64) -> Rat {
    if b == 1 && d == 1 {
        return Rat::from_reduced_i128(a as i128 + c as i128, 1);
    }
    let g = gcd_u64(b as u64, d as u64) as i128;
    let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
    if g == 1 {
        return Rat::from_reduced_i128(a * d + c * b, b * d);
    }
    let bg = b / g;
    let dg = d / g;
    let n = a * dg + c * bg;
    let g2 = gcd_u128(n.unsigned_abs(), g as u128) as i128;
    Rat::from_reduced_i128(n / g2, bg * (d / g2))
}

fn mul_small(a: i64, b: i64, c: i64, d: i64) -> Rat {
    let g1 = gcd_u64(a.unsigned_abs(), d as u64).max(1) as i128;
    let g2 = gcd_u64(c.unsigned_abs(), b as u64).max(1) as i128;
    let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
    Rat::from_reduced_i128((a / g1) * (c / g2), (b / g2) * (d / g1))
}

fn add_ref(x: &Rat, y: &Rat) -> Rat {
    match (&x.0, &y.0) {
        (Repr::Small(a, b), Repr::Small(c, d)) => add_small(*a, *b, *c, *d),
        _ => Rat::from_big(x.to_big() + y.to_big()),
    }
}

fn sub_ref(x: &Rat, y: &Rat) -> Rat {
    match (&x.0, &y.0) {
        (Repr::Small(a, b), Repr::Small(c, d)) => add_small(*a, *b, -*c, *d),
        _ => Rat::from_big(x.to_big() - y.to_big()),
    }
}

fn mul_ref(x: &Rat, y: &Rat) -> Rat {
    match (&x.0, &y.0) {
        (Repr::Small(0, _), _) | (_, Repr::Small(0, _)) => Rat::zero(),
        (Repr::Small(a, b), Repr::Small(c, d)) => mul_small(*a, *b, *c, *d),
        _ => Rat::from_big(x.to_big() * y.to_big()),
    }
}

fn div_ref(x: &Rat, y: &Rat) -> Rat {
    assert!(!y.is_zero(), "division by zero");
    match (&x.0, &y.0) {
        (Repr::Small(a, b), Repr::Small(c, d)) => {
            let (c, d) = if *c < 0 { (-*d, -*c) } else { (*d, *c) };
            mul_small(*a, *b, c, d)
        }
        _ => Rat::from_big(x.to_big() / y.to_big()),
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $f:ident, $atr:ident, $amethod:ident) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                $f(self, rhs)
            }
        }
        impl $tr<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                $f(self, &rhs)
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                $f(&self, rhs)
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                $f(&self, &rhs)
            }
        }
        impl $atr<&Rat> for Rat {
            fn $amethod(&mut self, rhs: &Rat) {
                *self = $f(self, rhs);
            }
        }
        impl $atr<Rat> for Rat {
            fn $amethod(&mut self, rhs: Rat) {
                *self = $f(self, &rhs);
            }
        }
    };
}

forward_binop!(Add, add, add_ref, AddAssign, add_assign);
forward_binop!(Sub, sub, sub_ref, SubAssign, sub_assign);
forward_binop!(Mul, mul, mul_ref, MulAssign, mul_assign);
forward_binop!(Div, div, div_ref, DivAssign, div_assign);

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => Rat(Repr::Small(-*n, *d)),
            Repr::Big(b) => Rat::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl Product for Rat {
    fn product<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |a, b| a * b)
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Rat) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => Rat::cmp_small(*a, *b, *c, *d),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::from_int(n)
    }
}

impl From<i32> for Rat {
    fn from(n: i32) -> Rat {
        Rat::from_int(n as i64)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Rat {
        Rat::from_bigint(n)
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Rat {
        Rat::from_big(r)
    }
}

impl Default for Rat {
    fn default() -> Rat {
        Rat::zero()
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = Error;

    /// Accepts `"n"`, `"n/d"` and plain decimals such as `"-0.125"`.
    fn from_str(s: &str) -> Result<Rat, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational number: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            return Rat::from_bigints(n, d).map_err(|_| bad());
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.trim_start().starts_with('-');
            let int_part = if int.is_empty() || int == "-" || int == "+" {
                BigInt::zero()
            } else {
                BigInt::from_str(int).map_err(|_| bad())?
            };
            let frac_part = BigInt::from_str(frac).map_err(|_| bad())?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let mag = int_part.abs() * &scale + frac_part;
            let num = if negative { -mag } else { mag };
            return Rat::from_bigints(num, scale);
        }
        let n = BigInt::from_str(s).map_err(|_| bad())?;
        Ok(Rat::from_bigint(n))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Rat, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Int(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Rat::from_int(n)),
        }
    }
}

/// Shorthand for `Rat::new`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_normalizes_sign() {
        assert_eq!(rat(2, -4), rat(-1, 2));
        assert_eq!(rat(-1, 2).to_string(), "-1/2");
        assert_eq!(rat(6, 3).to_string(), "2");
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rat::from_int(i64::MAX);
        let sum = &big + &big;
        assert!(sum.as_small().is_none());
        let back = &sum - &big;
        assert_eq!(back, big);
        assert!(back.as_small().is_some());
        let prod = &big * &big;
        assert_eq!(&prod / &big, big);
    }

    #[test]
    fn parse_forms() {
        assert_eq!("-3/6".parse::<Rat>().unwrap(), rat(-1, 2));
        assert_eq!("0.125".parse::<Rat>().unwrap(), rat(1, 8));
        assert_eq!("-0.5".parse::<Rat>().unwrap(), rat(-1, 2));
        assert_eq!("7".parse::<Rat>().unwrap(), rat(7, 1));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("abc".parse::<Rat>().is_err());
    }

    #[test]
    fn simplest_between_finds_small_denominators() {
        assert_eq!(Rat::simplest_between(&rat(1, 3), &rat(1, 2)), rat(1, 2));
        assert_eq!(Rat::simplest_between(&rat(31, 100), &rat(34, 100)), rat(1, 3));
        assert_eq!(Rat::simplest_between(&rat(-12, 5), &rat(-9, 4)), rat(-7, 3));
        assert_eq!(Rat::simplest_between(&rat(-1, 2), &rat(3, 2)), Rat::zero());
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(rat(-3, 2).floor(), rat(-2, 1));
        assert_eq!(rat(-3, 2).ceil(), rat(-1, 1));
        assert_eq!(rat(7, 2).floor(), rat(3, 1));
    }

    #[test]
    fn serde_uses_strings() {
        let s = serde_json::to_string(&rat(-1, 2)).unwrap();
        assert_eq!(s, "\"-1/2\"");
        let r: Rat = serde_json::from_str("\"3/9\"").unwrap();
        assert_eq!(r, rat(1, 3));
    }
}
