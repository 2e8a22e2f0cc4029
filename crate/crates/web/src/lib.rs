//! Browser bindings for the demo page in `www/`. Every export takes plain
//! strings and numbers and returns a JSON string; failures come back as a
//! JS exception carrying the message.
//!
//! The `*_json` functions hold the logic so they can be tested natively.

use sepcalc::capacity::{growth_bound, min_samples, vc_bound, CapacityQuery};
use sepcalc::constructions::{iterate, triangle_relu};
use sepcalc::network::crossing_bound;
use sepcalc::separation::{verify_separation, Candidate, SeparationTarget};
use sepcalc::{parse_net, LineMap, PiecewisePoly, Rat};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Display samples per curve.
const SAMPLES: i64 = 512;

fn sample(f: &PiecewisePoly, lo: &Rat, hi: &Rat) -> Value {
    let step = (hi - lo) * Rat::new(1, SAMPLES);
    let pts: Vec<[f64; 2]> = (0..=SAMPLES)
        .map(|i| {
            let x = lo + &(&step * Rat::from_int(i));
            [x.to_f64(), f.eval_rat(&x).to_f64()]
        })
        .collect();
    json!(pts)
}

fn parse(name: &str, s: &str) -> Result<Rat, String> {
    s.trim().parse().map_err(|e| format!("{name}: {e}"))
}

/// The k-th iterate of the ReLU triangle map: crossing number, the shape
/// bound and display samples on `[0, 1]`.
pub fn triangle_json(k: u32) -> Result<String, String> {
    if !(1..=12).contains(&k) {
        return Err("k must be between 1 and 12".into());
    }
    let net = iterate(&triangle_relu(), k as usize).map_err(|e| e.to_string())?;
    let f = net.compile().map_err(|e| e.to_string())?.output;
    let bound = crossing_bound(&net.profile()).map_err(|e| e.to_string())?;
    let out = json!({
        "k": k,
        "cr": f.crossing_number(),
        "bound": bound.simplified.unwrap_or(bound.layered).to_string(),
        "pieces": f.len(),
        "f": sample(&f, &Rat::zero(), &Rat::one()),
    });
    Ok(out.to_string())
}

/// Score the two-unit candidate `relu(a1·relu(x + b1) + a2·relu(x + b2) + c)`
/// against the k = 2 target; two layers of width two is the largest ReLU
/// shape that class admits. Coefficients are rationals such as `-3/4`.
pub fn probe_json(a1: &str, b1: &str, a2: &str, b2: &str, c: &str) -> Result<String, String> {
    let k = 2;
    let coef = [("a1", a1), ("b1", b1), ("a2", a2), ("b2", b2), ("c", c)]
        .iter()
        .map(|(n, s)| parse(n, s).map(|r| format!("\"{n}\":\"{r}\"")))
        .collect::<Result<Vec<_>, _>>()?;
    let text = format!(
        r#"{{"dim":1,"params":{{{}}},"layers":[[{{"gate":"relu","a":["1"],"b":"b1"}},{{"gate":"relu","a":["1"],"b":"b2"}}],[{{"gate":"relu","a":["a1","a2"],"b":"c","parents":[[1,0],[1,1]]}}]]}}"#,
        coef.join(",")
    );
    let g = Candidate::Net(parse_net(&text).map_err(|e| e.to_string())?);
    let target = SeparationTarget::new(k, 1).map_err(|e| e.to_string())?;
    let line = LineMap::axis(&[]);
    let width = Rat::new(1, 1 << 30);
    let r = verify_separation(&target, 0, &g, &line, &width).map_err(|e| e.to_string())?;
    let gf = g.along(&line).map_err(|e| e.to_string())?;
    let (lo, hi) = (Rat::zero(), Rat::one());
    let out = json!({
        "l1": r.l1.decimal(9),
        "l1_exact": r.l1.exact,
        "cr": r.cr,
        "bound": r.bound.to_string(),
        "disagree": r.disagreement.disagree,
        "chain": r.chain,
        "pass": r.pass,
        "target": sample(&target.f, &lo, &hi),
        "candidate": sample(&gf, &lo, &hi),
    });
    Ok(out.to_string())
}

/// VC and growth-function bounds for a network shape.
pub fn capacity_json(p: u32, l: u32, m: u32, t: u32, alpha: u32, beta: u32, n: u32) -> Result<String, String> {
    let q = CapacityQuery {
        p: p.into(),
        l: l.into(),
        m: m.into(),
        t: t.into(),
        alpha: alpha.into(),
        beta: beta.into(),
        n: n.into(),
        ..CapacityQuery::default()
    };
    let vc = vc_bound(&q).map_err(|e| e.to_string())?;
    let growth = match growth_bound(&q) {
        Ok(g) => g.sh.decimal(6),
        Err(e) => format!("undefined: {e}"),
    };
    let out = json!({
        "vc": vc.decimal(6),
        "growth": growth,
        "min_samples": min_samples(&q).map_err(|e| e.to_string())?,
    });
    Ok(out.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn triangle(k: u32) -> Result<String, JsValue> {
    js(triangle_json(k))
}

#[wasm_bindgen]
pub fn probe(a1: &str, b1: &str, a2: &str, b2: &str, c: &str) -> Result<String, JsValue> {
    js(probe_json(a1, b1, a2, b2, c))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn capacity(p: u32, l: u32, m: u32, t: u32, alpha: u32, beta: u32, n: u32) -> Result<String, JsValue> {
    js(capacity_json(p, l, m, t, alpha, beta, n))
}
