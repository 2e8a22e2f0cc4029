//! Exact certification of triangle waves on a window.

use serde::{Deserialize, Serialize};

use crate::exact::{AlgebraicReal, Poly, Rat};
use crate::piecewise::{roots_inside, sample_between, PiecewisePoly};

/// A certified `(t, [a, b])`-triangle: `2t + 1` breakpoints starting at `a`
/// and ending at `b`, values alternating 0, 1, 0, …, strictly increasing on
/// odd stretches and strictly decreasing on even ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleCert {
    pub t: usize,
    pub breakpoints: Vec<AlgebraicReal>,
    pub window: (Rat, Rat),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejected {
    pub reason: String,
}

fn reject<T>(reason: impl Into<String>) -> Result<T, Rejected> {
    Err(Rejected { reason: reason.into() })
}

fn value_at(p: &Poly, x: &AlgebraicReal) -> AlgebraicReal {
    x.eval_poly(p)
}

/// Accept `f` iff it is a triangle wave on `[a, b]`.
///
/// The window is cut at the breakpoints of `f` and at the critical points
/// of every piece; maximal runs of equal derivative sign are the monotone
/// stretches, and their ends are checked against the 0/1 pattern.
pub fn triangle_check(f: &PiecewisePoly, a: &Rat, b: &Rat) -> Result<TriangleCert, Rejected> {
    if a >= b {
        return reject(format!("empty window [{a}, {b}]"));
    }
    let (lo, hi) = (AlgebraicReal::from(a), AlgebraicReal::from(b));
    let mut points = vec![lo.clone()];
    points.extend(f.partition().cuts().iter().map(|c| c.at.clone()).filter(|x| x > &lo && x < &hi));
    points.push(hi.clone());

    // pieces of f over the window, with continuity at every boundary
    let mut segments: Vec<(&AlgebraicReal, &AlgebraicReal, &Poly)> = Vec::with_capacity(points.len() - 1);
    for w in points.windows(2) {
        let s = sample_between(Some(&w[0]), Some(&w[1]));
        segments.push((&w[0], &w[1], &f.polys()[f.partition().locate_rat(&s)]));
    }
    for (j, x) in points.iter().enumerate() {
        let v = f.eval(x);
        let left = j.checked_sub(1).map(|i| segments[i].2);
        let right = segments.get(j).map(|s| s.2);
        if left.into_iter().chain(right).any(|p| value_at(p, x) != v) {
            return reject(format!("discontinuous at {x}"));
        }
    }

    // maximal monotone runs: (start, derivative sign)
    let mut runs: Vec<(AlgebraicReal, i32)> = Vec::new();
    for (u, v, p) in segments {
        let d = p.derivative();
        if d.is_zero() {
            return reject(format!("constant on a stretch starting at {u}"));
        }
        let crit = roots_inside(&d, Some(u), Some(v)).expect("nonzero derivative");
        let mut from = u;
        for to in crit.iter().chain(std::iter::once(v)) {
            let sign = d.sign_at(&sample_between(Some(from), Some(to)));
            if runs.last().map(|r| r.1) != Some(sign) {
                runs.push((from.clone(), sign));
            }
            from = to;
        }
    }
    if runs[0].1 < 0 {
        return reject("decreasing at the left end");
    }
    if runs.len() % 2 == 1 {
        return reject(format!("{} monotone stretches, expected an even count", runs.len()));
    }
    let mut breakpoints: Vec<AlgebraicReal> = runs.into_iter().map(|r| r.0).collect();
    breakpoints.push(hi);
    let (zero, one) = (AlgebraicReal::from(Rat::zero()), AlgebraicReal::from(Rat::one()));
    for (i, x) in breakpoints.iter().enumerate() {
        let want = if i % 2 == 0 { &zero } else { &one };
        if &f.eval(x) != want {
            return reject(format!("value {} at breakpoint {x}, expected {want}", f.eval(x)));
        }
    }
    Ok(TriangleCert { t: (breakpoints.len() - 1) / 2, breakpoints, window: (a.clone(), b.clone()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{iterate, triangle_min, triangle_quad, triangle_relu};
    use crate::exact::rat;

    #[test]
    fn relu_triangle_certified() {
        let f = triangle_relu().compile().unwrap().output;
        let c = triangle_check(&f, &Rat::zero(), &Rat::one()).unwrap();
        assert_eq!(c.t, 1);
        let bps: Vec<AlgebraicReal> = [rat(0, 1), rat(1, 2), rat(1, 1)].into_iter().map(AlgebraicReal::from).collect();
        assert_eq!(c.breakpoints, bps);
    }

    #[test]
    fn rejections() {
        let zero = PiecewisePoly::zero();
        assert!(triangle_check(&zero, &Rat::zero(), &Rat::one()).is_err());
        let id = PiecewisePoly::identity();
        assert!(triangle_check(&id, &Rat::zero(), &Rat::one()).is_err());
        let step = PiecewisePoly::step(&rat(1, 2), &Rat::one());
        assert!(triangle_check(&step, &Rat::zero(), &Rat::one()).is_err());
        let f = triangle_relu().compile().unwrap().output;
        // the window must end where the wave returns to 0
        assert!(triangle_check(&f, &Rat::zero(), &rat(3, 4)).is_err());
    }

    #[test]
    fn families_and_iterates() {
        for net in [triangle_min(), triangle_quad()] {
            let f = net.compile().unwrap().output;
            assert_eq!(triangle_check(&f, &Rat::zero(), &Rat::one()).unwrap().t, 1);
        }
        let h2 = iterate(&triangle_quad(), 2).unwrap().compile().unwrap().output;
        assert_eq!(h2.degree(), 4);
        let c = triangle_check(&h2, &Rat::zero(), &Rat::one()).unwrap();
        assert_eq!(c.t, 2);
        // interior peaks of h∘h sit at irrational points
        assert!(c.breakpoints.iter().any(|x| !x.is_rational()));
    }
}
