use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rat;

/// Dense univariate polynomial with rational coefficients, lowest degree first.
///
/// Trailing zero coefficients are never stored; the zero polynomial has no
/// coefficients at all.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Poly {
        Poly::new(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Poly {
        Poly::new(vec![Rat::zero(), Rat::one()])
    }

    /// `c0 + c1 x`.
    pub fn linear(c0: Rat, c1: Rat) -> Poly {
        Poly::new(vec![c0, c1])
    }

    pub fn new(mut coeffs: Vec<Rat>) -> Poly {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Poly {
        Poly::new(coeffs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rat> {
        self.coeffs
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial counted as degree 0.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn lc(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = &acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &Rat) -> i32 {
        self.eval(x).signum()
    }

    /// Interval Horner evaluation over `[lo, hi]`. The result contains
    /// `p([lo, hi])` and shrinks monotonically when the input interval does.
    pub fn eval_range(&self, lo: &Rat, hi: &Rat) -> (Rat, Rat) {
        let mut acc_lo = Rat::zero();
        let mut acc_hi = Rat::zero();
        for c in self.coeffs.iter().rev() {
            let products = [&acc_lo * lo, &acc_lo * hi, &acc_hi * lo, &acc_hi * hi];
            let mut mn = products[0].clone();
            let mut mx = products[0].clone();
            for p in &products[1..] {
                if p < &mn {
                    mn = p.clone();
                }
                if p > &mx {
                    mx = p.clone();
                }
            }
            acc_lo = mn + c;
            acc_hi = mx + c;
        }
        (acc_lo, acc_hi)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_int(i as i64))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Poly {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(Rat::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            out.push(c / Rat::from_int(i as i64 + 1));
        }
        Poly::new(out)
    }

    /// `self(inner(x))` by Horner's scheme.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Poly::constant(c.clone());
        }
        acc
    }

    /// `self(a x + b)`, cheaper than a general composition.
    pub fn compose_affine(&self, a: &Rat, b: &Rat) -> Poly {
        self.compose(&Poly::linear(b.clone(), a.clone()))
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division. Panics when `divisor` is zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.lc();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &lc;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                let t = &c * dc;
                rem[i + j] -= t;
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    /// Monic version (zero stays zero).
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.lc().recip())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let r = a.rem(&b).primitive();
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Square-free part `p / gcd(p, p')`, returned primitive.
    pub fn square_free(&self) -> Poly {
        if self.is_constant() {
            return self.primitive();
        }
        let g = self.gcd(&self.derivative());
        if g.is_constant() {
            return self.primitive();
        }
        self.div_rem(&g).0.primitive()
    }

    /// Positive rational multiple with coprime integer coefficients and
    /// positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            den_lcm = den_lcm.lcm(&c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den_lcm / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for n in &ints {
            g = g.gcd(n);
        }
        if ints.last().is_some_and(|n| n.is_negative()) {
            g = -g;
        }
        Poly::new(ints.into_iter().map(|n| Rat::from_bigint(n / &g)).collect())
    }

    /// Largest absolute coefficient ratio bound: every real root lies in `(-B, B)`.
    pub fn cauchy_bound(&self) -> Rat {
        let lc = self.lc().abs();
        let mut mx = Rat::zero();
        for c in &self.coeffs[..self.coeffs.len().saturating_sub(1)] {
            let r = c.abs() / &lc;
            if r > mx {
                mx = r;
            }
        }
        mx + Rat::one()
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = long.coeffs.clone();
        for (o, s) in out.iter_mut().zip(&short.coeffs) {
            *o += s;
        }
        Poly::new(out)
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => out.push(a - b),
                (Some(a), None) => out.push(a.clone()),
                (None, Some(b)) => out.push(-b),
                (None, None) => unreachable!(),
            }
        }
        Poly::new(out)
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                if mag.is_integer() || i == 0 {
                    write!(f, "{mag}")?;
                } else {
                    write!(f, "({mag})")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{self}]")
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Poly, D::Error> {
        Ok(Poly::new(Vec::<Rat>::deserialize(deserializer)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn compose_binomial() {
        let outer = Poly::from_ints(&[0, 0, 1]);
        let inner = Poly::from_ints(&[1, 1]);
        assert_eq!(outer.compose(&inner), Poly::from_ints(&[1, 2, 1]));
    }

    #[test]
    fn compose_identity_outer() {
        let p = Poly::from_ints(&[3, -1, 4, 1]);
        assert_eq!(Poly::x().compose(&p), p);
    }

    #[test]
    fn compose_logistic_twice() {
        // h(x) = 4x(1-x); h(h(x)) has degree 4 and vanishes at 1/2
        let h = Poly::from_ints(&[0, 4, -4]);
        let hh = h.compose(&h);
        assert_eq!(hh.degree(), Some(4));
        for x in [rat(0, 1), rat(1, 3), rat(1, 2), rat(3, 4), rat(-2, 5)] {
            assert_eq!(hh.eval(&x), h.eval(&h.eval(&x)));
        }
        assert!(hh.eval(&rat(1, 2)).is_zero());
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = Poly::from_ints(&[5, 0, -3, 2, 7]);
        let b = Poly::from_ints(&[1, -2, 3]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn square_free_removes_repeated_factors() {
        // (x-1)^2 (x+2)
        let p = &Poly::from_ints(&[-1, 1]).pow(2) * &Poly::from_ints(&[2, 1]);
        assert_eq!(p.square_free(), Poly::from_ints(&[-2, 1, 1]));
    }

    #[test]
    fn primitive_has_integer_coprime_coefficients() {
        let p = Poly::new(vec![rat(-1, 2), rat(0, 1), rat(-3, 4)]);
        assert_eq!(p.primitive(), Poly::from_ints(&[2, 0, 3]));
    }

    #[test]
    fn range_eval_contains_values() {
        let p = Poly::from_ints(&[1, -3, 0, 2]);
        let (lo, hi) = p.eval_range(&rat(-1, 2), &rat(3, 4));
        for k in 0..=20 {
            let x = rat(-1, 2) + rat(5, 4) * rat(k, 20);
            let v = p.eval(&x);
            assert!(lo <= v && v <= hi);
        }
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(Poly::new(vec![rat(-1, 2), rat(2, 1), rat(1, 1)]).to_string(), "x^2 + 2x - 1/2");
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
