//! Capacity calculators for parametrized semi-algebraic networks: VC and
//! growth-function bounds, region counts, the random-label error bound,
//! the sample-size threshold, and a Monte-Carlo check of that threshold.
//!
//! Every transcendental quantity is a certified [`Enclosure`].

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exact::{Enclosure, MPoly, Rat};
use crate::gates::GateSpec;
use crate::network::{NetProfile, NetworkGraph, Node};
use crate::piecewise::PiecewisePoly;
use crate::{Error, Result};

/// Counts describing a network family and a sample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityQuery {
    pub p: u64,
    pub l: u64,
    pub m: u64,
    pub t: u64,
    pub alpha: u64,
    pub beta: u64,
    pub n: u64,
    pub delta: Rat,
}

impl Default for CapacityQuery {
    fn default() -> Self {
        CapacityQuery { p: 1, l: 1, m: 1, t: 1, alpha: 1, beta: 1, n: 1, delta: Rat::new(1, 20) }
    }
}

impl CapacityQuery {
    /// Shape counts from a profile; zero gate counts are raised to 1.
    pub fn from_profile(prof: &NetProfile, n: u64, delta: Rat) -> CapacityQuery {
        let one = |x: usize| (x as u64).max(1);
        CapacityQuery {
            p: one(prof.p),
            l: one(prof.l),
            m: one(prof.m),
            t: one(prof.max_t()),
            alpha: one(prof.max_alpha()),
            beta: one(prof.max_beta()),
            n,
            delta,
        }
    }

    fn check_counts(&self) -> Result<()> {
        let named = [("p", self.p), ("l", self.l), ("m", self.m), ("t", self.t), ("alpha", self.alpha), ("beta", self.beta), ("n", self.n)];
        if let Some((name, _)) = named.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidArgument(format!("{name} must be at least 1")));
        }
        check_delta(&self.delta)
    }
}

/// `δ ∈ (0, 1]`; `δ = 1` is allowed so the `ln(1/δ)` term can vanish.
fn check_delta(delta: &Rat) -> Result<()> {
    if !delta.is_positive() || delta > &Rat::one() {
        return Err(Error::InvalidArgument(format!("delta = {delta} must lie in (0, 1]")));
    }
    Ok(())
}

fn int(x: u64) -> Enclosure {
    Enclosure::exact(Rat::from_bigint(x.into()))
}

fn ln_int(x: u64) -> Enclosure {
    int(x).ln()
}

/// `ln(1/δ)`.
fn ln_inv(delta: &Rat) -> Enclosure {
    Enclosure::exact(delta.recip()).ln()
}

/// `ln(8e·c) = ln 8 + 1 + ln c`, avoiding a product of enclosures.
fn ln_8e(c: u64) -> Enclosure {
    &(&ln_int(8) + &Enclosure::from_int(1)) + &ln_int(c)
}

/// `6p(l+1)(ln(2p(l+1)) + ln(8emtα) + l·ln β)`.
pub fn vc_bound(q: &CapacityQuery) -> Result<Enclosure> {
    q.check_counts()?;
    let pl1 = q.p * (q.l + 1);
    let inner = &(&ln_int(2 * pl1) + &ln_8e(q.m * q.t * q.alpha)) + &ln_int(q.beta).scale(&Rat::from_int(q.l as i64));
    Ok(inner.scale(&Rat::from_int(6 * pl1 as i64)).rounded())
}

/// Growth-function bound `(8enmtαβ^l)^{p(l+1)}` with its region-count
/// companion `(8enmtαβ^l)^{pl}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthBound {
    pub sh: Enclosure,
    pub regions: Enclosure,
}

pub fn growth_bound(q: &CapacityQuery) -> Result<GrowthBound> {
    q.check_counts()?;
    if q.n < q.p {
        return Err(Error::BelowThreshold { n: q.n, required: q.p });
    }
    let beta_l = Rat::from_bigint(q.beta.into()).pow(q.l as i32);
    let c = Rat::from_bigint((q.n as u128 * q.m as u128 * q.t as u128 * q.alpha as u128).into()) * beta_l * Rat::from_int(8);
    let base = Enclosure::e().scale(&c);
    let exp = |e: u64| u32::try_from(e).map_err(|_| Error::InvalidArgument("exponent too large".into()));
    Ok(GrowthBound { sh: base.powi(exp(q.p * (q.l + 1))?), regions: base.powi(exp(q.p * q.l)?) })
}

/// `2(4e|Q|α/p)^p`, the number of sign patterns of `|Q|` polynomials of
/// degree at most `α` in `p` variables.
pub fn region_count_bound(qcount: u64, alpha: u64, p: u64) -> Result<Enclosure> {
    if p == 0 {
        return Err(Error::InvalidArgument("p must be at least 1".into()));
    }
    let c = Rat::from_bigint((4 * qcount as u128 * alpha as u128).into()) / Rat::from_bigint(p.into());
    let e = u32::try_from(p).map_err(|_| Error::InvalidArgument("p too large".into()))?;
    Ok(Enclosure::e().scale(&c).powi(e).scale(&Rat::from_int(2)))
}

/// `(1/2)(1 − √((ln Sh + ln(1/δ))/(2n)))`: with probability at least `1−δ`
/// over uniform labels, every member of a family with growth function
/// `Sh` errs on at least this fraction of `n` points.
pub fn random_label_bound(sh: &Enclosure, n: u64, delta: &Rat) -> Result<Enclosure> {
    if sh.low < Rat::one() {
        return Err(Error::InvalidArgument(format!("growth value {sh} must be at least 1")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    check_delta(delta)?;
    let num = &sh.ln() + &ln_inv(delta);
    let root = num.scale(&Rat::from_bigint((2 * n as u128).into()).recip()).sqrt();
    Ok((&Enclosure::from_int(1) - &root).scale(&Rat::new(1, 2)).rounded())
}

/// `8pl²·ln(8emtαβ·p(l+1)) + 4ln(1/δ)`, the sample size above which
/// random labels cannot be fit to error below 1/4.
pub fn sample_threshold(q: &CapacityQuery) -> Result<Enclosure> {
    q.check_counts()?;
    let lead = ln_8e(q.m * q.t * q.alpha * q.beta * q.p * (q.l + 1)).scale(&Rat::from_int(8 * (q.p * q.l * q.l) as i64));
    Ok((&lead + &ln_inv(&q.delta).scale(&Rat::from_int(4))).rounded())
}

/// The least integer `n` meeting [`sample_threshold`]; `q.n` is ignored.
pub fn min_samples(q: &CapacityQuery) -> Result<u64> {
    let x = sample_threshold(q)?;
    let (lo, hi) = (x.low.ceil(), x.high.ceil());
    if lo != hi {
        return Err(Error::InvalidArgument(format!("threshold {x} straddles an integer")));
    }
    hi.to_i64().and_then(|v| u64::try_from(v).ok()).ok_or(Error::InvalidArgument("threshold too large".into()))
}

/// `σ(x − w)` with `σ = 1[· ≥ 0]` and one parameter `w`.
pub fn threshold_net() -> NetworkGraph {
    let q: MPoly = "v1 - w".parse().expect("literal");
    let gate = GateSpec::Polyact { sigma: PiecewisePoly::step(&Rat::zero(), &Rat::one()), q };
    let params = BTreeMap::from([("w".to_string(), Rat::zero())]);
    NetworkGraph::new(1, params, vec![vec![Node::new(gate, vec![(0, 0)])]]).expect("valid network")
}

/// The sample `x_i = i/n`, `i = 0, …, n−1`.
pub fn experiment_points(n: u64) -> Vec<Rat> {
    (0..n as i64).map(|i| Rat::new(i, n as i64)).collect()
}

/// Midpoints between consecutive sample points plus one point beyond each
/// end. For a single threshold this realizes every achievable labeling.
pub fn threshold_grid(points: &[Rat]) -> Vec<Rat> {
    let mut sorted = points.to_vec();
    sorted.sort();
    let Some((first, last)) = sorted.first().zip(sorted.last()) else {
        return vec![Rat::zero()];
    };
    let mut g = vec![first - Rat::one()];
    g.extend(sorted.windows(2).map(|w| Rat::midpoint(&w[0], &w[1])));
    g.push(last + Rat::one());
    g
}

/// How labels are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelMode {
    /// Independent fair coins, as the bound assumes.
    Uniform,
    /// Every label equal to the given bit. Diagnostic only.
    Constant(u8),
}

/// Labels for one trial, from the stream seeded by `seed + trial`.
pub fn trial_labels(mode: LabelMode, seed: u64, trial: u64, n: u64) -> Vec<u8> {
    match mode {
        LabelMode::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial));
            (0..n).map(|_| rng.gen_range(0..=1u8)).collect()
        }
        LabelMode::Constant(b) => vec![b; n as usize],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    pub delta: Rat,
    pub mode: LabelMode,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { n: 64, trials: 200, seed: 11, delta: Rat::new(1, 20), mode: LabelMode::Uniform }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: u64,
    /// `(1/n)·#{i : f(x_i) ≠ y_i}` at `best_params`.
    pub best_error: Rat,
    pub best_params: BTreeMap<String, Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Least admissible `n` for the net's shape.
    pub required: u64,
    pub trials: Vec<TrialResult>,
    /// Trials whose best error is below 1/4.
    pub failures: u64,
    pub failure_fraction: Rat,
    /// `δ + 3√(δ(1−δ)/trials)`.
    pub allowed: Enclosure,
    /// Labels were not uniform, so the bound says nothing.
    pub diagnostic: bool,
    pub pass: bool,
}

fn param_grids(net: &NetworkGraph, points: &[Rat], grid: Option<&[Vec<Rat>]>) -> Result<(Vec<String>, Vec<Vec<Rat>>)> {
    let names: Vec<String> = net.used_params().into_iter().collect();
    if names.is_empty() || names.len() > 2 {
        return Err(Error::InvalidArgument(format!("grid search needs 1 or 2 parameters, the net has {}", names.len())));
    }
    let axes: Vec<Vec<Rat>> = match grid {
        Some(g) if g.len() == names.len() => g.to_vec(),
        Some(g) => return Err(Error::LengthMismatch { expected: names.len(), got: g.len() }),
        None => vec![threshold_grid(points); names.len()],
    };
    if axes.iter().any(Vec::is_empty) {
        return Err(Error::EmptySearchSpace);
    }
    let mut combos: Vec<Vec<Rat>> = vec![vec![]];
    for axis in &axes {
        combos = combos.into_iter().flat_map(|c| axis.iter().map(move |v| [c.clone(), vec![v.clone()]].concat())).collect();
    }
    Ok((names, combos))
}

/// Draw labels, grid-search the parameters of a one-input net with one or
/// two named parameters, and count the trials fit to error below 1/4.
///
/// Outputs are read as classes by `f ≥ 1/2`. The parameter count used for
/// the sample threshold is the number of searched names. With `grid = None`
/// each parameter ranges over [`threshold_grid`].
pub fn random_label_experiment(net: &NetworkGraph, cfg: &ExperimentConfig, grid: Option<&[Vec<Rat>]>) -> Result<ExperimentReport> {
    if net.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: net.dim() });
    }
    check_delta(&cfg.delta)?;
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is needed".into()));
    }
    let mut prof = net.profile();
    prof.p = net.used_params().len();
    let required = min_samples(&CapacityQuery::from_profile(&prof, cfg.n, cfg.delta.clone()))?;
    if cfg.n < required {
        return Err(Error::BelowThreshold { n: cfg.n, required });
    }
    let points = experiment_points(cfg.n);
    let (names, combos) = param_grids(net, &points, grid)?;

    // predictions depend only on the parameters, so compute them once
    let half = Rat::new(1, 2);
    let predictions = combos
        .iter()
        .map(|vals| {
            let bound = net.with_params(names.iter().cloned().zip(vals.iter().cloned()).collect());
            points.iter().map(|x| Ok(u8::from(bound.eval(std::slice::from_ref(x))? >= half))).collect::<Result<Vec<u8>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let quarter = Rat::new(1, 4);
    let mut trials = Vec::with_capacity(cfg.trials as usize);
    let mut failures = 0u64;
    for trial in 0..cfg.trials {
        let labels = trial_labels(cfg.mode, cfg.seed, trial, cfg.n);
        let (best, wrong) = predictions
            .iter()
            .enumerate()
            .map(|(j, pred)| (j, pred.iter().zip(&labels).filter(|(a, b)| a != b).count()))
            .min_by_key(|&(j, w)| (w, j))
            .expect("non-empty grid");
        let best_error = Rat::new(wrong as i64, cfg.n as i64);
        if best_error < quarter {
            failures += 1;
        }
        let best_params = names.iter().cloned().zip(combos[best].iter().cloned()).collect();
        trials.push(TrialResult { trial, best_error, best_params });
    }
    let failure_fraction = Rat::new(failures as i64, cfg.trials as i64);
    let d = &cfg.delta;
    let slack = Enclosure::exact(d * &(Rat::one() - d) / Rat::from_int(cfg.trials as i64)).sqrt().scale(&Rat::from_int(3));
    let allowed = (&Enclosure::exact(d.clone()) + &slack).rounded();
    let diagnostic = cfg.mode != LabelMode::Uniform;
    let pass = !diagnostic && allowed.certainly_ge(&failure_fraction);
    Ok(ExperimentReport { config: cfg.clone(), required, trials, failures, failure_fraction, allowed, diagnostic, pass })
}

pub const EXPERIMENT_CSV_HEADER: &str = "trial,best_error,best_params";

impl ExperimentReport {
    /// One row per trial, then a summary row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(EXPERIMENT_CSV_HEADER);
        out.push('\n');
        for t in &self.trials {
            let params: Vec<String> = t.best_params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!("{},{},{}\n", t.trial, t.best_error, params.join(";")));
        }
        out.push_str(&format!(
            "summary,{},failures={};allowed={};delta={};diagnostic={};pass={}\n",
            self.failure_fraction, self.failures, self.allowed.decimal(12), self.config.delta, self.diagnostic, self.pass
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn near(e: &Enclosure, x: f64, tol: f64) -> bool {
        (e.to_f64() - x).abs() < tol && e.width() < rat(1, 1_000_000_000)
    }

    #[test]
    fn vc_examples() {
        let q = CapacityQuery::default();
        let v = vc_bound(&q).unwrap();
        let want = 12.0 * (4f64.ln() + (8.0 * std::f64::consts::E).ln());
        assert!(near(&v, want, 1e-9), "{v}");
        assert!((v.to_f64() - 53.59).abs() < 0.005);
        let v2 = vc_bound(&CapacityQuery { p: 2, ..q.clone() }).unwrap();
        assert!(v2.low > v.high.clone() * rat(2, 1));
        assert!(vc_bound(&CapacityQuery { beta: 0, ..q }).is_err());
    }

    #[test]
    fn growth_examples() {
        let e8 = 8.0 * std::f64::consts::E;
        let q = CapacityQuery::default();
        let g = growth_bound(&q).unwrap();
        assert!((g.sh.to_f64() - e8 * e8).abs() < 1e-9, "{} {}", g.sh, e8 * e8);
        assert!((g.sh.to_f64() - 473.0).abs() < 0.15);
        assert!((g.regions.to_f64() - e8).abs() < 1e-9);
        let g2 = growth_bound(&CapacityQuery { p: 2, n: 2, ..q.clone() }).unwrap();
        let g1 = growth_bound(&CapacityQuery { n: 2, ..q.clone() }).unwrap();
        assert!((g2.sh.to_f64() / g1.sh.to_f64().powi(2) - 1.0).abs() < 1e-12);
        let g = growth_bound(&CapacityQuery { n: 16, l: 2, m: 3, ..q.clone() }).unwrap();
        assert!((g.sh.to_f64() / (e8 * 48.0).powi(3) - 1.0).abs() < 1e-12);
        assert!(matches!(growth_bound(&CapacityQuery { p: 3, n: 2, ..q }), Err(Error::BelowThreshold { .. })));
    }

    #[test]
    fn region_examples() {
        let e = std::f64::consts::E;
        assert!((region_count_bound(1, 1, 1).unwrap().to_f64() - 8.0 * e).abs() < 1e-9);
        let z = region_count_bound(5, 0, 3).unwrap();
        assert!(z.low.is_zero() && z.high.is_zero());
        let r = region_count_bound(4, 2, 2).unwrap();
        assert!((r.to_f64() - 2.0 * (16.0 * e).powi(2)).abs() < 1e-9);
        assert!((r.to_f64() - 3783.2).abs() < 0.05);
    }

    #[test]
    fn random_label_examples() {
        let b = random_label_bound(&Enclosure::from_int(2), 8, &Rat::one()).unwrap();
        assert!(near(&b, 0.5 * (1.0 - (2f64.ln() / 16.0).sqrt()), 1e-9));
        assert!((b.to_f64() - 0.396).abs() < 0.001);
        let far = random_label_bound(&Enclosure::from_int(2), 1 << 40, &Rat::one()).unwrap();
        assert!(far.low > b.high && far.high < rat(1, 2));
        assert!(random_label_bound(&Enclosure::from_int(2), 8, &Rat::zero()).is_err());
        assert!(random_label_bound(&Enclosure::exact(rat(1, 2)), 8, &Rat::one()).is_err());
    }

    #[test]
    fn min_samples_examples() {
        let q = CapacityQuery::default();
        assert_eq!(min_samples(&q).unwrap(), 43);
        let at_one = sample_threshold(&CapacityQuery { delta: Rat::one(), ..q.clone() }).unwrap();
        assert!(near(&at_one, 8.0 * (16.0 * std::f64::consts::E).ln(), 1e-9));
        // at the threshold the random-label bound reaches 1/4
        let n = min_samples(&q).unwrap();
        let sh = growth_bound(&CapacityQuery { n, ..q.clone() }).unwrap().sh;
        assert!(random_label_bound(&sh, n, &q.delta).unwrap().certainly_ge(&rat(1, 4)));
    }

    #[test]
    fn threshold_net_shape() {
        let net = threshold_net();
        let q = CapacityQuery::from_profile(&net.profile(), 64, rat(1, 20));
        assert_eq!((q.l, q.m, q.t, q.alpha, q.beta), (1, 1, 1, 1, 1));
        assert_eq!(net.used_params().len(), 1);
        let at = |w: Rat, x: Rat| net.with_params(BTreeMap::from([("w".into(), w)])).eval(&[x]).unwrap();
        assert_eq!(at(rat(1, 2), rat(1, 2)), Rat::one());
        assert_eq!(at(rat(1, 2), rat(1, 3)), Rat::zero());
    }

    #[test]
    fn experiment_runs_and_replays() {
        let net = threshold_net();
        let cfg = ExperimentConfig::default();
        let r = random_label_experiment(&net, &cfg, None).unwrap();
        assert_eq!(r.required, 43);
        assert_eq!(r.trials.len(), 200);
        assert!(r.pass, "{} failures", r.failures);
        let pts = experiment_points(cfg.n);
        for t in r.trials.iter().take(20) {
            let labels = trial_labels(cfg.mode, cfg.seed, t.trial, cfg.n);
            let g = net.with_params(t.best_params.clone());
            let wrong = pts.iter().zip(&labels).filter(|(x, y)| u8::from(g.eval_direct(std::slice::from_ref(*x)).unwrap() >= rat(1, 2)) != **y).count();
            assert_eq!(Rat::new(wrong as i64, cfg.n as i64), t.best_error);
        }
        assert_eq!(r, random_label_experiment(&net, &cfg, None).unwrap());
    }

    #[test]
    fn experiment_diagnostic_and_refusal() {
        let net = threshold_net();
        let cfg = ExperimentConfig { mode: LabelMode::Constant(1), trials: 3, ..Default::default() };
        let r = random_label_experiment(&net, &cfg, None).unwrap();
        assert!(r.diagnostic && !r.pass);
        assert!(r.trials.iter().all(|t| t.best_error.is_zero()));
        let cfg = ExperimentConfig { n: 10, ..Default::default() };
        assert!(matches!(random_label_experiment(&net, &cfg, None), Err(Error::BelowThreshold { n: 10, required: 43 })));
    }
}
