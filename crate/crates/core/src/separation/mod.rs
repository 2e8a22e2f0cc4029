//! Checking depth separation on concrete candidates: the discrete measure on
//! triangle extrema, exact L¹ distances to the deep target along lines, and
//! the crossing-number chain that lower-bounds them.

mod candidates;
mod harness;

use serde::{Deserialize, Serialize};

use crate::constructions::{closed_form_fk, iterate, triangle_check, triangle_quad, TriangleCert};
use crate::exact::{AlgebraicReal, Enclosure, Poly, Rat};
use crate::piecewise::PiecewisePoly;
use crate::{Error, Result};

pub use candidates::{candidate_search, grid, random_low_crossing, verify_family, Candidate, CandidateKind, CandidateSpec, SearchResult};
pub use harness::{verify_separation, ClassLimits, SeparationReport, SeparationTarget, CSV_HEADER};

/// Uniform measure on the `2^k + 1` extrema of a triangle iterate, with
/// the exact target value (0 or 1) at each.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuSample {
    pub points: Vec<AlgebraicReal>,
    pub values: Vec<u8>,
}

impl NuSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Breakpoints of a certified triangle, with values 0, 1, 0, ….
    pub fn from_cert(cert: &TriangleCert) -> NuSample {
        NuSample { points: cert.breakpoints.clone(), values: (0..cert.breakpoints.len()).map(|i| (i % 2) as u8).collect() }
    }
}

/// `z_i = i·2^{−k}` for the ReLU triangle iterate `f^k`, each value checked
/// against the closed form.
pub fn nu_points(k: u32) -> Result<NuSample> {
    if k < 1 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let s = 1i64.checked_shl(k).filter(|s| *s > 0).ok_or(Error::InvalidArgument("k too large".into()))?;
    let mut points = Vec::with_capacity(s as usize + 1);
    let mut values = Vec::with_capacity(s as usize + 1);
    for i in 0..=s {
        let z = Rat::new(i, s);
        let v = (i % 2) as u8;
        if closed_form_fk(&z, k)? != Rat::from_int(v as i64) {
            return Err(Error::InvalidArgument(format!("extremum {z} does not take value {v}")));
        }
        points.push(AlgebraicReal::from(z));
        values.push(v);
    }
    Ok(NuSample { points, values })
}

/// Errors under the discrete measure: classification error (exact) and
/// mean absolute error (exact at rational points, otherwise an enclosure of
/// width at most `width`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteErrors {
    pub classify: Rat,
    pub value: Enclosure,
}

pub fn discrete_errors(target: &PiecewisePoly, g: &PiecewisePoly, nu: &NuSample, width: &Rat) -> Result<DiscreteErrors> {
    if nu.is_empty() {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    let half = AlgebraicReal::from(Rat::new(1, 2));
    let s = Rat::from_int(nu.len() as i64);
    let per_point = width * &s;
    let mut wrong = 0i64;
    let mut total = Enclosure::exact(Rat::zero());
    for z in &nu.points {
        let (hv, gv) = (target.eval(z), g.eval(z));
        if (hv >= half) != (gv >= half) {
            wrong += 1;
        }
        let term = match (hv.as_rational(), gv.as_rational()) {
            (Some(a), Some(b)) => Enclosure::exact((a - b).abs()),
            _ => {
                let p = &target.polys()[target.partition().locate(z)];
                let q = &g.polys()[g.partition().locate(z)];
                let (lo, hi) = z.eval_enclosure(&(p - q), &per_point);
                if lo.is_negative() && hi.is_positive() {
                    Enclosure::new(Rat::zero(), std::cmp::max(&lo.abs(), &hi).clone())
                } else {
                    Enclosure::new(std::cmp::min(&lo.abs(), &hi.abs()).clone(), std::cmp::max(&lo.abs(), &hi.abs()).clone())
                }
            }
        };
        total = &total + &term;
    }
    Ok(DiscreteErrors { classify: Rat::new(wrong, nu.len() as i64), value: total.scale(&s.recip()) })
}

/// Outcome of checking a low-degree polynomial against `(4z(1−z))^{∘k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyReport {
    pub k: u32,
    pub degree: usize,
    pub cr: usize,
    /// `1 + degree`, at most `1 + 2^{k−3}`.
    pub cr_bound: usize,
    pub errors: DiscreteErrors,
    /// `classify ≥ 1/4` and `value ≥ 1/8` (lower end of the enclosure).
    pub pass: bool,
}

/// `(4z(1−z))^{∘k}` compiled, with its certificate.
pub fn quad_target(k: u32) -> Result<(PiecewisePoly, TriangleCert)> {
    let h = iterate(&triangle_quad(), k as usize)?.compile()?.output;
    let cert = triangle_check(&h, &Rat::zero(), &Rat::one())
        .map_err(|r| Error::InvalidArgument(format!("quadratic iterate not certified: {}", r.reason)))?;
    Ok((h, cert))
}

pub fn poly_separation_check(k: u32, g: &Poly, width: &Rat) -> Result<PolyReport> {
    if !(1..=30).contains(&k) {
        return Err(Error::InvalidArgument("k must be in 1..=30".into()));
    }
    let degree = g.degree_or_zero();
    // degree ≤ 2^{k−3}, i.e. 8·degree ≤ 2^k
    if 8 * degree as u64 > 1u64 << k {
        return Err(Error::DegreeTooLarge { degree, limit: (1usize << k) / 8 });
    }
    let (h, cert) = quad_target(k)?;
    let nu = NuSample::from_cert(&cert);
    let gp = PiecewisePoly::from_poly(g.clone());
    let cr = gp.crossing_number();
    let errors = discrete_errors(&h, &gp, &nu, width)?;
    let pass = errors.classify >= Rat::new(1, 4) && errors.value.low >= Rat::new(1, 8);
    Ok(PolyReport { k, degree, cr, cr_bound: 1 + degree, errors, pass })
}

/// Least-squares polynomial of degree `deg` fitting `target` on `[lo, hi]`,
/// from the normal equations solved exactly. Only for polynomial targets
/// per piece with rational breakpoints inside the window.
pub fn least_squares_fit(target: &PiecewisePoly, deg: usize, lo: &Rat, hi: &Rat) -> Result<Poly> {
    let n = deg + 1;
    let moment = |p: &Poly| -> Result<Rat> {
        let mut acc = Rat::zero();
        let window = PiecewisePoly::from_poly(p.clone());
        let prod = PiecewisePoly::compose_poly(&"v1*v2".parse().expect("literal"), &[target, &window])?;
        let mut edges = vec![lo.clone()];
        for c in prod.partition().cuts() {
            let x = c.at.as_rational().ok_or(Error::InvalidArgument("irrational breakpoint".into()))?;
            if x > lo && x < hi {
                edges.push(x.clone());
            }
        }
        edges.push(hi.clone());
        for w in edges.windows(2) {
            let mid = Rat::midpoint(&w[0], &w[1]);
            let anti = prod.polys()[prod.partition().locate_rat(&mid)].antiderivative();
            acc += anti.eval(&w[1]) - anti.eval(&w[0]);
        }
        Ok(acc)
    };
    let x = Poly::x();
    let mut a = vec![vec![Rat::zero(); n + 1]; n];
    for i in 0..n {
        for j in 0..n {
            let e = (i + j) as i32 + 1;
            a[i][j] = (hi.pow(e) - lo.pow(e)) / Rat::from_int(e as i64);
        }
        a[i][n] = moment(&x.pow(i as u32))?;
    }
    // Gauss-Jordan on the (nonsingular) Hilbert-type system
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).ok_or(Error::InvalidArgument("singular system".into()))?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in c..=n {
                    let d = &f * &a[c][j];
                    a[r][j] -= d;
                }
            }
        }
    }
    Ok(Poly::new(a.into_iter().map(|row| row[n].clone()).collect()))
}
