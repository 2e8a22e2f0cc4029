//! Static SVG plots of univariate piecewise polynomials over a window.
//!
//! Each curve is sampled at its breakpoints inside the window and at 8
//! interior points per piece; x is exact, y is rounded for display only.

use std::fmt::Write;

use sepcalc::{AlgebraicReal, PiecewisePoly, Rat};

const W: f64 = 720.0;
const H: f64 = 360.0;
const PAD: f64 = 40.0;
const BAND: f64 = 10.0;
const COLORS: [&str; 2] = ["#1f5fa8", "#c0392b"];

fn samples(f: &PiecewisePoly, lo: &Rat, hi: &Rat) -> Vec<(f64, f64)> {
    let (alo, ahi) = (AlgebraicReal::from(lo), AlgebraicReal::from(hi));
    let mut edges = vec![alo.clone()];
    edges.extend(f.partition().cuts().iter().map(|c| c.at.clone()).filter(|x| x > &alo && x < &ahi));
    edges.push(ahi);
    let mut out = Vec::new();
    for w in edges.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        out.push((a.to_f64(), f.eval(a).to_f64()));
        // interior points at rationals strictly between the two edges
        let mid = AlgebraicReal::from(AlgebraicReal::rational_between(a, b));
        let ra = AlgebraicReal::rational_between(a, &mid);
        let rb = AlgebraicReal::rational_between(&mid, b);
        for i in 0..8 {
            let x = &ra + &((&rb - &ra) * Rat::new(i, 7));
            out.push((x.to_f64(), f.eval_rat(&x).to_f64()));
        }
    }
    let last = edges.last().unwrap();
    out.push((last.to_f64(), f.eval(last).to_f64()));
    out
}

/// Intervals of the window where `1[f ≥ 1/2]` is 1, as display floats.
fn bands(f: &PiecewisePoly, lo: &Rat, hi: &Rat) -> Vec<(f64, f64)> {
    let c = f.classifier();
    let (alo, ahi) = (AlgebraicReal::from(lo), AlgebraicReal::from(hi));
    let mut out = Vec::new();
    for (iv, p) in c.pieces() {
        if p.is_zero() {
            continue;
        }
        let a = iv.lo.as_ref().map_or(alo.clone(), |x| std::cmp::max(x, &alo).clone());
        let b = iv.hi.as_ref().map_or(ahi.clone(), |x| std::cmp::min(x, &ahi).clone());
        if a <= b {
            out.push((a.to_f64(), b.to_f64()));
        }
    }
    out
}

/// Plot up to two functions over `[lo, hi]` with a strip per function
/// marking where its classifier is 1.
pub fn plot(curves: &[(&str, &PiecewisePoly)], lo: &Rat, hi: &Rat) -> String {
    let sampled: Vec<Vec<(f64, f64)>> = curves.iter().map(|(_, f)| samples(f, lo, hi)).collect();
    let (mut ymin, mut ymax) = (0f64, 1f64);
    for p in sampled.iter().flatten() {
        if p.1.is_finite() {
            ymin = ymin.min(p.1);
            ymax = ymax.max(p.1);
        }
    }
    let (x0, x1) = (lo.to_f64(), hi.to_f64());
    let strips = curves.len() as f64 * (BAND + 4.0);
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - ymin) / (ymax - ymin) * (H - 2.0 * PAD - strips);
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="monospace" font-size="11">"#).unwrap();
    writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##).unwrap();
    // axes and the 1/2 threshold
    writeln!(s, r##"<line x1="{PAD}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888"/>"##, sy(0.0), W - PAD, sy(0.0)).unwrap();
    writeln!(s, r##"<line x1="{PAD}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#bbb" stroke-dasharray="4 3"/>"##, sy(0.5), W - PAD, sy(0.5)).unwrap();
    writeln!(s, r##"<text x="{PAD}" y="{:.2}" fill="#555">{lo}</text><text x="{:.2}" y="{:.2}" fill="#555" text-anchor="end">{hi}</text>"##, H - 8.0, W - PAD, H - 8.0).unwrap();
    for (i, ((name, f), pts)) in curves.iter().zip(&sampled).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let top = PAD + i as f64 * (BAND + 4.0) - BAND;
        for (a, b) in bands(f, lo, hi) {
            writeln!(s, r#"<rect x="{:.2}" y="{top:.2}" width="{:.2}" height="{BAND}" fill="{color}" fill-opacity="0.35"/>"#, sx(a), (sx(b) - sx(a)).max(0.5)).unwrap();
        }
        let path: Vec<String> = pts.iter().filter(|p| p.1.is_finite()).map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.join(" ")).unwrap();
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" fill="{color}" text-anchor="end">{name}</text>"#, W - PAD, top + BAND - 1.0).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
