use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Poly, Rat};
use crate::{Error, Result};

/// A variable of a multivariate polynomial: a gate input or a named parameter.
///
/// Inputs print as `v1`, `v2`, ... (one-based); every other identifier is a
/// parameter name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Input(u32),
    Param(String),
}

impl Var {
    pub fn param(name: &str) -> Var {
        Var::Param(name.to_string())
    }

    fn from_name(name: &str) -> Result<Var> {
        if let Some(rest) = name.strip_prefix('v') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let n: u32 = rest
                    .parse()
                    .map_err(|_| Error::Parse(format!("input index too large: {name}")))?;
                if n == 0 {
                    return Err(Error::Parse("inputs are numbered from v1".into()));
                }
                return Ok(Var::Input(n - 1));
            }
        }
        Ok(Var::Param(name.to_string()))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Input(i) => write!(f, "v{}", i + 1),
            Var::Param(name) => f.write_str(name),
        }
    }
}

type Monomial = Vec<(Var, u32)>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0.clone(), a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sparse multivariate polynomial over gate inputs and named parameters.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Rat>,
}

impl MPoly {
    pub fn zero() -> MPoly {
        MPoly::default()
    }

    pub fn constant(c: Rat) -> MPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        MPoly { terms }
    }

    pub fn var(v: Var) -> MPoly {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(v, 1)], Rat::one());
        MPoly { terms }
    }

    /// The zero-based input `i` (printed `v{i+1}`).
    pub fn input(i: u32) -> MPoly {
        MPoly::var(Var::Input(i))
    }

    pub fn param(name: &str) -> MPoly {
        MPoly::var(Var::param(name))
    }

    /// `Σ a_i v_i + b`.
    pub fn affine(a: &[Rat], b: &Rat) -> MPoly {
        let mut out = MPoly::constant(b.clone());
        for (i, c) in a.iter().enumerate() {
            out.add_term(vec![(Var::Input(i as u32), 1)], c.clone());
        }
        out
    }

    fn add_term(&mut self, mono: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[(Var, u32)], &Rat)> {
        self.terms.iter().map(|(m, c)| (m.as_slice(), c))
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.iter().map(|(_, e)| *e as usize).sum::<usize>())
            .max()
            .unwrap_or(0)
    }

    /// Degree counting only input variables; parameters act as constants.
    pub fn input_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| {
                m.iter()
                    .filter(|(v, _)| matches!(v, Var::Input(_)))
                    .map(|(_, e)| *e as usize)
                    .sum::<usize>()
            })
            .max()
            .unwrap_or(0)
    }

    /// Number of inputs referenced (largest index + 1).
    pub fn input_count(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|m| m.iter())
            .filter_map(|(v, _)| match v {
                Var::Input(i) => Some(*i as usize + 1),
                Var::Param(_) => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn params(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|m| m.iter())
            .filter_map(|(v, _)| match v {
                Var::Param(p) => Some(p.clone()),
                Var::Input(_) => None,
            })
            .collect()
    }

    /// The constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::constant(Rat::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Replace every bound parameter by its value; unbound names stay symbolic.
    pub fn substitute_params(&self, values: &BTreeMap<String, Rat>) -> MPoly {
        let mut out = MPoly::zero();
        for (mono, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::with_capacity(mono.len());
            for (v, e) in mono {
                match v {
                    Var::Param(p) if values.contains_key(p) => {
                        coef *= values[p].pow(*e as i32);
                    }
                    _ => rest.push((v.clone(), *e)),
                }
            }
            out.add_term(rest, coef);
        }
        out
    }

    /// Bind all parameters, failing on the first unbound name.
    pub fn bind_params(&self, values: &BTreeMap<String, Rat>) -> Result<MPoly> {
        let out = self.substitute_params(values);
        match out.params().into_iter().next() {
            Some(name) => Err(Error::UnboundVariable(name)),
            None => Ok(out),
        }
    }

    pub fn eval(&self, inputs: &[Rat], params: &BTreeMap<String, Rat>) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (mono, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in mono {
                let base = match v {
                    Var::Input(i) => inputs.get(*i as usize).ok_or(Error::ArityMismatch {
                        expected: *i as usize + 1,
                        got: inputs.len(),
                    })?,
                    Var::Param(p) => params.get(p).ok_or_else(|| Error::UnboundVariable(p.clone()))?,
                };
                t *= base.pow(*e as i32);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitute univariate polynomials for the inputs. Fails when a
    /// parameter is still symbolic or an input has no argument.
    pub fn substitute_univariate(&self, args: &[Poly]) -> Result<Poly> {
        let mut powers: BTreeMap<(u32, u32), Poly> = BTreeMap::new();
        let mut acc = Poly::zero();
        for (mono, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (v, e) in mono {
                let i = match v {
                    Var::Input(i) => *i,
                    Var::Param(p) => return Err(Error::UnboundVariable(p.clone())),
                };
                let arg = args.get(i as usize).ok_or(Error::ArityMismatch {
                    expected: i as usize + 1,
                    got: args.len(),
                })?;
                let pw = powers.entry((i, *e)).or_insert_with(|| arg.pow(*e));
                t = &t * pw;
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Substitute multivariate polynomials for the inputs (parameters untouched).
    pub fn substitute_inputs(&self, args: &[MPoly]) -> Result<MPoly> {
        let mut acc = MPoly::zero();
        for (mono, c) in &self.terms {
            let mut t = MPoly::constant(c.clone());
            for (v, e) in mono {
                match v {
                    Var::Input(i) => {
                        let arg = args.get(*i as usize).ok_or(Error::ArityMismatch {
                            expected: *i as usize + 1,
                            got: args.len(),
                        })?;
                        t = &t * &arg.pow(*e);
                    }
                    Var::Param(_) => t = &t * &MPoly { terms: BTreeMap::from([(vec![(v.clone(), *e)], Rat::one())]) },
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// `outer(self)` for a univariate `outer`.
    pub fn compose_into(&self, outer: &Poly) -> MPoly {
        let mut acc = MPoly::zero();
        for c in outer.coeffs().iter().rev() {
            acc = &(&acc * self) + &MPoly::constant(c.clone());
        }
        acc
    }
}

impl Add<&MPoly> for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub<&MPoly> for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul<&MPoly> for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Add for MPoly {
    type Output = MPoly;
    fn add(self, rhs: MPoly) -> MPoly {
        &self + &rhs
    }
}

impl Sub for MPoly {
    type Output = MPoly;
    fn sub(self, rhs: MPoly) -> MPoly {
        &self - &rhs
    }
}

impl Mul for MPoly {
    type Output = MPoly;
    fn mul(self, rhs: MPoly) -> MPoly {
        &self * &rhs
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

impl fmt::Display for MPoly {
    /// Terms in descending total degree, e.g. `-4*v1^2 + 4*v1 + w`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(m, _)| std::cmp::Reverse(m.iter().map(|(_, e)| *e).sum::<u32>()));
        for (i, (mono, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mag = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || mono.is_empty() {
                factors.push(mag.to_string());
            }
            for (v, e) in mono {
                if *e == 1 {
                    factors.push(v.to_string());
                } else {
                    factors.push(format!("{v}^{e}"));
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly[{self}]")
    }
}

impl FromStr for MPoly {
    type Err = Error;

    /// Parses sums of products such as `4*v1 - 4*v1^2 + 1/2*w*v2`.
    /// Rational coefficients may be written `n/d` directly.
    fn from_str(s: &str) -> Result<MPoly> {
        let mut out = MPoly::zero();
        let bytes: Vec<char> = s.chars().collect();
        let mut pos = 0usize;
        let err = |pos: usize, msg: &str| Error::Parse(format!("polynomial {s:?}, column {}: {msg}", pos + 1));
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_whitespace() {
                *pos += 1;
            }
        };
        skip_ws(&mut pos);
        if pos == bytes.len() {
            return Err(err(pos, "empty polynomial"));
        }
        let mut first = true;
        while pos < bytes.len() {
            let mut sign = Rat::one();
            skip_ws(&mut pos);
            if pos < bytes.len() && (bytes[pos] == '+' || bytes[pos] == '-') {
                if bytes[pos] == '-' {
                    sign = -sign;
                }
                pos += 1;
            } else if !first {
                return Err(err(pos, "expected '+' or '-'"));
            }
            first = false;
            let mut coef = sign;
            let mut mono: Monomial = Vec::new();
            loop {
                skip_ws(&mut pos);
                if pos >= bytes.len() {
                    return Err(err(pos, "expected a factor"));
                }
                let c = bytes[pos];
                if c.is_ascii_digit() {
                    let start = pos;
                    while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == '/' || bytes[pos] == '.') {
                        pos += 1;
                    }
                    let text: String = bytes[start..pos].iter().collect();
                    let r: Rat = text.parse().map_err(|_| err(start, "bad number"))?;
                    coef *= r;
                } else if c.is_ascii_alphabetic() || c == '_' {
                    let start = pos;
                    while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == '_') {
                        pos += 1;
                    }
                    let name: String = bytes[start..pos].iter().collect();
                    let var = Var::from_name(&name).map_err(|_| err(start, "inputs are numbered from v1"))?;
                    skip_ws(&mut pos);
                    let mut e = 1u32;
                    if pos < bytes.len() && bytes[pos] == '^' {
                        pos += 1;
                        skip_ws(&mut pos);
                        let es = pos;
                        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                            pos += 1;
                        }
                        let text: String = bytes[es..pos].iter().collect();
                        e = text.parse().map_err(|_| err(es, "bad exponent"))?;
                    }
                    if e > 0 {
                        mono = mono_mul(&mono, &vec![(var, e)]);
                    }
                } else {
                    return Err(err(pos, "unexpected character"));
                }
                skip_ws(&mut pos);
                if pos < bytes.len() && bytes[pos] == '*' {
                    pos += 1;
                    continue;
                }
                break;
            }
            out.add_term(mono, coef);
            skip_ws(&mut pos);
        }
        Ok(out)
    }
}

impl Serialize for MPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<MPoly, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn parse_and_print_round_trip() {
        let p: MPoly = "4*v1 - 4*v1^2".parse().unwrap();
        assert_eq!(p.to_string(), "-4*v1^2 + 4*v1");
        let q: MPoly = p.to_string().parse().unwrap();
        assert_eq!(p, q);
        let r: MPoly = "1/2*w*v2 - c + 3".parse().unwrap();
        assert_eq!(r.params().len(), 2);
        assert_eq!(r.input_degree(), 1);
        assert_eq!(r.total_degree(), 2);
        assert_eq!(r.to_string().parse::<MPoly>().unwrap(), r);
    }

    #[test]
    fn parse_errors_point_at_column() {
        let e = "2*v1 + *".parse::<MPoly>().unwrap_err();
        assert!(e.to_string().contains("column"));
        assert!("v0".parse::<MPoly>().is_err());
        assert!("".parse::<MPoly>().is_err());
    }

    #[test]
    fn univariate_substitution() {
        let f: MPoly = "v1*v2".parse().unwrap();
        let g = f
            .substitute_univariate(&[Poly::from_ints(&[1, 1]), Poly::from_ints(&[-1, 1])])
            .unwrap();
        assert_eq!(g, Poly::from_ints(&[-1, 0, 1]));
    }

    #[test]
    fn unbound_parameter_is_reported() {
        let f: MPoly = "w*v1".parse().unwrap();
        assert_eq!(
            f.substitute_univariate(&[Poly::x()]).unwrap_err(),
            Error::UnboundVariable("w".into())
        );
        let bound = f.bind_params(&BTreeMap::from([("w".to_string(), rat(3, 1))])).unwrap();
        assert_eq!(bound.eval(&[rat(2, 1)], &BTreeMap::new()).unwrap(), rat(6, 1));
    }

    #[test]
    fn input_substitution_composes() {
        let f: MPoly = "v1^2 + v2".parse().unwrap();
        let g = f
            .substitute_inputs(&["v1 + v2".parse().unwrap(), "3".parse().unwrap()])
            .unwrap();
        assert_eq!(g, "v1^2 + 2*v1*v2 + v2^2 + 3".parse().unwrap());
    }
}
