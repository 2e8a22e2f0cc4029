use std::cmp::Ordering;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::roots::{isolate_roots, sturm_count, sturm_sequence};
use super::{Poly, Rat};
use crate::{Error, Result};

/// An exact real number: a rational, or the unique root of a square-free
/// integer polynomial inside an open rational interval.
///
/// The algebraic form is only used for irrational values.
#[derive(Clone)]
pub struct AlgebraicReal(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Rational(Rat),
    Algebraic { poly: Poly, lo: Rat, hi: Rat },
}

impl From<Rat> for AlgebraicReal {
    fn from(r: Rat) -> AlgebraicReal {
        AlgebraicReal(Repr::Rational(r))
    }
}

impl From<&Rat> for AlgebraicReal {
    fn from(r: &Rat) -> AlgebraicReal {
        AlgebraicReal(Repr::Rational(r.clone()))
    }
}

impl AlgebraicReal {
    pub fn zero() -> AlgebraicReal {
        Rat::zero().into()
    }

    /// Trusted constructor used by root isolation: `poly` is square-free and
    /// primitive with no rational roots, and `(lo, hi)` isolates one root.
    pub(crate) fn from_isolating(poly: Poly, lo: Rat, hi: Rat) -> AlgebraicReal {
        debug_assert!(lo < hi);
        AlgebraicReal(Repr::Algebraic { poly, lo, hi })
    }

    /// Checked constructor: the root of `poly` in the open interval `(lo, hi)`.
    /// Returns the rational form when that root is rational.
    pub fn root_in(poly: &Poly, lo: &Rat, hi: &Rat) -> Result<AlgebraicReal> {
        if poly.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if lo >= hi {
            return Err(Error::EmptyInterval(format!("({lo}, {hi})")));
        }
        let roots: Vec<AlgebraicReal> = isolate_roots(poly, Some(lo), Some(hi))?
            .into_iter()
            .filter(|r| r.cmp_rat(lo) == Ordering::Greater && r.cmp_rat(hi) == Ordering::Less)
            .collect();
        if roots.len() != 1 {
            return Err(Error::InvalidArgument(format!(
                "interval ({lo}, {hi}) contains {} roots of {poly}, expected exactly one",
                roots.len()
            )));
        }
        Ok(roots.into_iter().next().unwrap())
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.0, Repr::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        match &self.0 {
            Repr::Rational(r) => Some(r),
            Repr::Algebraic { .. } => None,
        }
    }

    pub fn defining_poly(&self) -> Option<&Poly> {
        match &self.0 {
            Repr::Rational(_) => None,
            Repr::Algebraic { poly, .. } => Some(poly),
        }
    }

    /// Rational bounds `(lo, hi)`; equal for rationals, the open isolating
    /// interval otherwise.
    pub fn enclosure(&self) -> (Rat, Rat) {
        match &self.0 {
            Repr::Rational(r) => (r.clone(), r.clone()),
            Repr::Algebraic { lo, hi, .. } => (lo.clone(), hi.clone()),
        }
    }

    pub fn width(&self) -> Rat {
        match &self.0 {
            Repr::Rational(_) => Rat::zero(),
            Repr::Algebraic { lo, hi, .. } => hi - lo,
        }
    }

    /// Halve the isolating interval once.
    pub fn bisected(&self) -> AlgebraicReal {
        match &self.0 {
            Repr::Rational(_) => self.clone(),
            Repr::Algebraic { poly, lo, hi } => {
                let mid = Rat::midpoint(lo, hi);
                let sm = poly.sign_at(&mid);
                if sm == 0 {
                    // unreachable for a polynomial without rational roots
                    return AlgebraicReal::from(mid);
                }
                if sm == poly.sign_at(lo) {
                    AlgebraicReal::from_isolating(poly.clone(), mid, hi.clone())
                } else {
                    AlgebraicReal::from_isolating(poly.clone(), lo.clone(), mid)
                }
            }
        }
    }

    /// Bisect until the enclosure is narrower than `width`.
    pub fn refined(&self, width: &Rat) -> AlgebraicReal {
        let mut cur = self.clone();
        while !cur.is_rational() && &cur.width() >= width {
            cur = cur.bisected();
        }
        cur
    }

    pub fn cmp_rat(&self, r: &Rat) -> Ordering {
        match &self.0 {
            Repr::Rational(x) => x.cmp(r),
            Repr::Algebraic { poly, lo, hi } => {
                if r <= lo {
                    Ordering::Greater
                } else if r >= hi {
                    Ordering::Less
                } else {
                    // no sign change on (lo, r) puts the root above r
                    let sr = poly.sign_at(r);
                    debug_assert!(sr != 0);
                    if sr == poly.sign_at(lo) {
                        Ordering::Greater
                    } else {
                        Ordering::Less
                    }
                }
            }
        }
    }

    /// Whether two algebraic numbers with overlapping enclosures are equal.
    fn alg_equal(p1: &Poly, lo1: &Rat, hi1: &Rat, p2: &Poly, lo2: &Rat, hi2: &Rat) -> bool {
        let lo = lo1.max(lo2);
        let hi = hi1.min(hi2);
        if lo >= hi {
            return false;
        }
        let g = p1.gcd(p2);
        if g.is_constant() {
            return false;
        }
        // endpoints of the overlap are endpoints of one of the intervals, so not roots of g
        sturm_count(&sturm_sequence(&g), Some(lo), Some(hi)) > 0
    }

    /// Sign of `q` at this number.
    pub fn sign_of_poly(&self, q: &Poly) -> i32 {
        match &self.0 {
            Repr::Rational(r) => q.sign_at(r),
            Repr::Algebraic { poly, lo, hi } => {
                if q.is_zero() {
                    return 0;
                }
                let g = poly.gcd(q);
                if !g.is_constant() && sturm_count(&sturm_sequence(&g), Some(lo), Some(hi)) > 0 {
                    return 0;
                }
                let mut cur = self.clone();
                loop {
                    let (l, h) = cur.enclosure();
                    let (vl, vh) = q.eval_range(&l, &h);
                    if vl.is_positive() {
                        return 1;
                    }
                    if vh.is_negative() {
                        return -1;
                    }
                    cur = cur.bisected();
                    if let Some(r) = cur.as_rational() {
                        return q.sign_at(r);
                    }
                }
            }
        }
    }

    /// Enclosure of `q(self)` no wider than `width`.
    pub fn eval_enclosure(&self, q: &Poly, width: &Rat) -> (Rat, Rat) {
        let mut cur = self.clone();
        loop {
            let (l, h) = cur.enclosure();
            let (vl, vh) = q.eval_range(&l, &h);
            if &(&vh - &vl) <= width || cur.is_rational() {
                return (vl, vh);
            }
            cur = cur.bisected();
        }
    }

    /// The exact value `q(self)`.
    pub fn eval_poly(&self, q: &Poly) -> AlgebraicReal {
        let p = match &self.0 {
            Repr::Rational(r) => return q.eval(r).into(),
            Repr::Algebraic { poly, .. } => poly,
        };
        let q = q.rem(p);
        if q.is_constant() {
            return q.coeff(0).into();
        }
        // q(self) is a root of R(y) = Res_x(p(x), y - q(x))
        let n = p.degree_or_zero();
        let xs: Vec<Rat> = (0..=n as i64).map(Rat::from_int).collect();
        let ys: Vec<Rat> = xs
            .iter()
            .map(|y| resultant(p, &(&Poly::constant(y.clone()) - &q)))
            .collect();
        let r = interpolate(&xs, &ys).square_free();
        let roots = isolate_roots(&r, None, None).expect("resultant is nonzero");
        let mut cur = self.clone();
        loop {
            let (l, h) = cur.enclosure();
            let (vl, vh) = q.eval_range(&l, &h);
            let inside: Vec<&AlgebraicReal> = roots
                .iter()
                .filter(|z| z.cmp_rat(&vl) != Ordering::Less && z.cmp_rat(&vh) != Ordering::Greater)
                .collect();
            if inside.len() == 1 {
                return inside[0].clone();
            }
            cur = cur.bisected();
        }
    }

    /// A rational strictly between `a < b`.
    pub fn rational_between(a: &AlgebraicReal, b: &AlgebraicReal) -> Rat {
        debug_assert!(a < b);
        let mut a = a.clone();
        let mut b = b.clone();
        loop {
            let ah = a.enclosure().1;
            let bl = b.enclosure().0;
            if ah < bl {
                let three = Rat::from_int(3);
                let m1 = (&ah * Rat::from_int(2) + &bl) / &three;
                let m2 = (&ah + &bl * Rat::from_int(2)) / &three;
                return Rat::simplest_between(&m1, &m2);
            }
            if ah == bl && !a.is_rational() && !b.is_rational() {
                return ah;
            }
            if ah == bl && a.is_rational() != b.is_rational() {
                // the shared endpoint is the rational one; step inside the other
                if a.is_rational() {
                    b = b.bisected();
                } else {
                    a = a.bisected();
                }
                continue;
            }
            if a.width() >= b.width() {
                a = a.bisected();
            } else {
                b = b.bisected();
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Rational(r) => r.to_f64(),
            Repr::Algebraic { .. } => {
                let fine = self.refined(&Rat::dyadic(1, 60));
                let (l, h) = fine.enclosure();
                Rat::midpoint(&l, &h).to_f64()
            }
        }
    }

    pub fn neg(&self) -> AlgebraicReal {
        match &self.0 {
            Repr::Rational(r) => (-r).into(),
            Repr::Algebraic { poly, lo, hi } => {
                let flipped = poly.compose(&Poly::linear(Rat::zero(), -Rat::one())).primitive();
                AlgebraicReal::from_isolating(flipped, -hi, -lo)
            }
        }
    }
}

/// Resultant of two univariate polynomials by the Euclidean algorithm.
pub(crate) fn resultant(a: &Poly, b: &Poly) -> Rat {
    if a.is_zero() || b.is_zero() {
        return Rat::zero();
    }
    let mut a = a.clone();
    let mut b = b.clone();
    let mut acc = Rat::one();
    loop {
        let m = a.degree_or_zero();
        let n = b.degree_or_zero();
        if n == 0 {
            return acc * b.lc().pow(m as i32);
        }
        let r = a.rem(&b);
        if r.is_zero() {
            return Rat::zero();
        }
        let k = r.degree_or_zero();
        if (m * n) % 2 == 1 {
            acc = -acc;
        }
        acc *= b.lc().pow((m - k) as i32);
        a = b;
        b = r;
    }
}

/// Newton interpolation through `(xs[i], ys[i])`.
fn interpolate(xs: &[Rat], ys: &[Rat]) -> Poly {
    let n = xs.len();
    let mut coef = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut out = Poly::constant(coef[n - 1].clone());
    for i in (0..n - 1).rev() {
        out = &(&out * &Poly::linear(-&xs[i], Rat::one())) + &Poly::constant(coef[i].clone());
    }
    out
}

impl Ord for AlgebraicReal {
    fn cmp(&self, other: &AlgebraicReal) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Rational(a), Repr::Rational(b)) => a.cmp(b),
            (_, Repr::Rational(b)) => self.cmp_rat(b),
            (Repr::Rational(a), _) => other.cmp_rat(a).reverse(),
            (Repr::Algebraic { poly: p1, lo: l1, hi: h1 }, Repr::Algebraic { poly: p2, lo: l2, hi: h2 }) => {
                if h1 <= l2 {
                    return Ordering::Less;
                }
                if h2 <= l1 {
                    return Ordering::Greater;
                }
                if AlgebraicReal::alg_equal(p1, l1, h1, p2, l2, h2) {
                    return Ordering::Equal;
                }
                let mut a = self.clone();
                let mut b = other.clone();
                loop {
                    let (al, ah) = a.enclosure();
                    let (bl, bh) = b.enclosure();
                    if ah <= bl {
                        return Ordering::Less;
                    }
                    if bh <= al {
                        return Ordering::Greater;
                    }
                    a = a.bisected();
                    b = b.bisected();
                    if a.is_rational() || b.is_rational() {
                        return a.cmp(&b);
                    }
                }
            }
        }
    }
}

impl PartialEq for AlgebraicReal {
    fn eq(&self, other: &AlgebraicReal) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for AlgebraicReal {}

impl PartialOrd for AlgebraicReal {
    fn partial_cmp(&self, other: &AlgebraicReal) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rational(r) => write!(f, "{r}"),
            Repr::Algebraic { poly, lo, hi } => write!(f, "root of {poly} in ({lo}, {hi})"),
        }
    }
}

impl fmt::Debug for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct Descriptor {
    poly: Poly,
    lo: Rat,
    hi: Rat,
}

impl Serialize for AlgebraicReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.0 {
            Repr::Rational(r) => r.serialize(serializer),
            Repr::Algebraic { poly, lo, hi } => {
                Descriptor { poly: poly.clone(), lo: lo.clone(), hi: hi.clone() }.serialize(serializer)
            }
        }
    }
}

impl<'de> Deserialize<'de> for AlgebraicReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<AlgebraicReal, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Rational(Rat),
            Algebraic(Descriptor),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Rational(r) => Ok(r.into()),
            Raw::Algebraic(d) => AlgebraicReal::root_in(&d.poly, &d.lo, &d.hi).map_err(D::Error::custom),
        }
    }
}
