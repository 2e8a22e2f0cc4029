//! `sepcalc`: exact crossing numbers, L¹ distances, separation checks and
//! capacity bounds from the command line.
//!
//! Exit codes: 0 success, 1 a check ran and failed, 2 bad input.

mod svg;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sepcalc::capacity::{
    growth_bound, min_samples, random_label_bound, random_label_experiment, region_count_bound, sample_threshold, threshold_net, vc_bound,
    CapacityQuery, ExperimentConfig, LabelMode,
};
use sepcalc::constructions::{hard_network, iterate, repeat_signal, triangle_check, triangle_min, triangle_quad, triangle_relu};
use sepcalc::network::crossing_bound;
use sepcalc::piecewise::l1_distance;
use sepcalc::separation::{nu_points, verify_separation, CandidateSpec, SeparationTarget, CSV_HEADER};
use sepcalc::{parse_net, Enclosure, LineMap, NetworkGraph, PiecewisePoly, Rat};

#[derive(Parser)]
#[command(name = "sepcalc", version, about = "Exact depth-separation calculus for semi-algebraic networks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args)]
struct NetArgs {
    /// Network file, or `builtin:NAME` (triangle, triangle-min, triangle-quad, hard-k1, hard-k2, threshold)
    #[arg(long)]
    net: String,
    /// Restrict along `z ↦ a·z + b`, written `a1,a2,…;b1,b2,…`
    #[arg(long)]
    line: Option<LineMap>,
    /// Stack the network on itself this many times first
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t)]
    out: Format,
    /// Also draw the functions over the window as SVG
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, value_parser = parse_window, default_value = "0,1")]
    window: (Rat, Rat),
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a network along a line and print its piece table
    Compile {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Crossing number of the compiled network against its a-priori bound
    Crossings {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Certified L¹ distance between a network and a candidate over the window
    L1 {
        #[command(flatten)]
        net: NetArgs,
        /// `zero`, `const:R`, a network file or `builtin:NAME`
        #[arg(long)]
        candidate: String,
        #[arg(long, default_value = "1/1073741824")]
        width: Rat,
        #[command(flatten)]
        output: Output,
    },
    /// Compare a candidate family against the deep target
    Separation {
        #[arg(long)]
        k: u32,
        /// relu-grid, stumps or poly
        #[arg(long, default_value = "relu-grid")]
        candidates: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Line `p_y`, written `1,0,…;0,y2,…`
        #[arg(long)]
        line: Option<LineMap>,
        #[arg(long, default_value = "1/1073741824")]
        width: Rat,
        #[command(flatten)]
        output: Output,
    },
    /// The discrete measure on the extrema of the k-th triangle iterate
    Nu {
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value_t)]
        out: Format,
    },
    /// Certify a compiled network as a triangle wave on the window
    Triangle {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        output: Output,
    },
    /// VC, growth-function, region-count and sample-size bounds
    Vc(VcArgs),
    /// Fit uniformly random labels with a grid-searched network
    Labels {
        /// Network with one or two named parameters (default: a single threshold)
        #[arg(long)]
        net: Option<String>,
        #[arg(long, default_value_t = 64)]
        n: u64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 11)]
        seed: u64,
        #[arg(long, default_value = "1/20")]
        delta: Rat,
        /// Diagnostic run with every label equal to this bit
        #[arg(long)]
        constant: Option<u8>,
        #[arg(long, value_enum, default_value_t)]
        out: Format,
    },
    /// Repeat a symmetric signal 2^k times on [0, 1]
    Repeat {
        #[arg(long)]
        k: usize,
        /// `tent` or a one-input network
        #[arg(long, default_value = "tent")]
        signal: String,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct VcArgs {
    /// Take p, l, m, t, α, β from this network's profile
    #[arg(long)]
    net: Option<String>,
    #[arg(long, default_value_t = 1)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    l: u64,
    #[arg(long, default_value_t = 1)]
    m: u64,
    #[arg(long, default_value_t = 1)]
    t: u64,
    #[arg(long, default_value_t = 1)]
    alpha: u64,
    #[arg(long, default_value_t = 1)]
    beta: u64,
    #[arg(long, default_value_t = 1)]
    n: u64,
    #[arg(long, default_value = "1/20")]
    delta: Rat,
    /// Predicate count for the region bound (default t)
    #[arg(long)]
    q: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    out: Format,
}

/// How a command ended short of success.
enum Exit {
    Fail(String),
    Usage(String),
}

impl From<sepcalc::Error> for Exit {
    fn from(e: sepcalc::Error) -> Exit {
        Exit::Usage(e.to_string())
    }
}

type Run = Result<String, Exit>;

fn parse_window(s: &str) -> Result<(Rat, Rat), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: Rat = a.trim().parse().map_err(|e: sepcalc::Error| e.to_string())?;
    let hi: Rat = b.trim().parse().map_err(|e: sepcalc::Error| e.to_string())?;
    if lo >= hi {
        return Err(format!("empty window {lo},{hi}"));
    }
    Ok((lo, hi))
}

fn load_net(spec: &str) -> Result<NetworkGraph, Exit> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return Ok(match name {
            "triangle" => triangle_relu(),
            "triangle-min" => triangle_min(),
            "triangle-quad" => triangle_quad(),
            "hard-k1" => hard_network(1, 1)?,
            "hard-k2" => hard_network(2, 1)?,
            "threshold" => threshold_net(),
            _ => return Err(Exit::Usage(format!("unknown builtin network `{name}`"))),
        });
    }
    let text = std::fs::read_to_string(spec).map_err(|e| Exit::Usage(format!("{spec}: {e}")))?;
    parse_net(&text).map_err(|e| Exit::Usage(format!("{spec}: {e}")))
}

fn default_line(dim: usize) -> LineMap {
    LineMap::axis(&vec![Rat::zero(); dim - 1])
}

impl NetArgs {
    fn network(&self) -> Result<NetworkGraph, Exit> {
        let net = load_net(&self.net)?;
        Ok(match self.k {
            Some(k) => iterate(&net, k)?,
            None => net,
        })
    }

    fn line_for(&self, net: &NetworkGraph) -> Result<LineMap, Exit> {
        match &self.line {
            Some(l) => Ok(l.clone()),
            None if net.dim() == 1 => Ok(default_line(1)),
            None => Err(Exit::Usage(format!("the network has {} inputs; pass --line", net.dim()))),
        }
    }

    fn compiled(&self) -> Result<(NetworkGraph, PiecewisePoly), Exit> {
        let net = self.network()?;
        let line = self.line_for(&net)?;
        let f = net.restrict_line(&line)?.compile()?.output;
        Ok((net, f))
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn piece_table(f: &PiecewisePoly, out: Format) -> String {
    match out {
        Format::Json => json(f),
        Format::Csv => {
            let mut s = String::from("piece,interval,poly\n");
            for (i, (iv, p)) in f.pieces().into_iter().enumerate() {
                writeln!(s, "{i},{},{}", csv_field(&iv.to_string()), csv_field(&p.to_string())).unwrap();
            }
            s
        }
    }
}

fn write_svg(output: &Output, curves: &[(&str, &PiecewisePoly)]) -> Result<(), Exit> {
    if let Some(path) = &output.svg {
        let (lo, hi) = &output.window;
        std::fs::write(path, svg::plot(curves, lo, hi)).map_err(|e| Exit::Usage(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn show(e: &Enclosure) -> String {
    e.decimal(12)
}

fn compile(net: &NetArgs, output: &Output) -> Run {
    let (_, f) = net.compiled()?;
    write_svg(output, &[("f", &f)])?;
    Ok(piece_table(&f, output.out))
}

fn crossings(net_args: &NetArgs, output: &Output) -> Run {
    let (net, f) = net_args.compiled()?;
    let restricted = net.restrict_line(&net_args.line_for(&net)?)?;
    let bounds = crossing_bound(&restricted.profile())?;
    let cr = f.crossing_number();
    let bound = bounds.simplified.clone().unwrap_or(bounds.layered.clone());
    write_svg(output, &[("f", &f)])?;
    let text = match output.out {
        Format::Csv => format!("Cr={cr}, bound={bound}, layered={}\n", bounds.layered),
        Format::Json => json(&serde_json::json!({ "cr": cr, "bound": bound, "layered": bounds.layered, "simplified": bounds.simplified })),
    };
    if Rat::from_int(cr as i64) > bound {
        return Err(Exit::Fail(format!("{text}crossing number exceeds the bound")));
    }
    Ok(text)
}

fn candidate(spec: &str, dim: usize, line: &LineMap) -> Result<PiecewisePoly, Exit> {
    if spec == "zero" {
        return Ok(PiecewisePoly::zero());
    }
    if let Some(c) = spec.strip_prefix("const:") {
        return Ok(PiecewisePoly::constant(c.parse()?));
    }
    let g = load_net(spec)?;
    if g.dim() != dim {
        return Err(Exit::Usage(format!("candidate has {} inputs, the network {dim}", g.dim())));
    }
    Ok(g.restrict_line(line)?.compile()?.output)
}

fn l1(net_args: &NetArgs, cand: &str, width: &Rat, output: &Output) -> Run {
    let net = net_args.network()?;
    let line = net_args.line_for(&net)?;
    let f = net.restrict_line(&line)?.compile()?.output;
    let g = candidate(cand, net.dim(), &line)?;
    let (lo, hi) = &output.window;
    let d = l1_distance(&f, &g, lo, hi, width)?;
    write_svg(output, &[("f", &f), ("g", &g)])?;
    Ok(match output.out {
        Format::Csv if d.exact => format!("exact {}\n", d.low),
        Format::Csv => format!("enclosure {}\n", d.decimal(12)),
        Format::Json => json(&serde_json::json!({ "l1": d, "decimal": d.decimal(12), "window": [lo, hi] })),
    })
}

struct SeparationRun<'a> {
    k: u32,
    name: &'a str,
    seed: u64,
    dim: usize,
    line: Option<LineMap>,
    width: &'a Rat,
}

fn separation(s: SeparationRun, output: &Output) -> Run {
    let target = SeparationTarget::new(s.k, s.dim)?;
    let family = CandidateSpec::preset(s.name, s.k, s.seed)?.generate()?;
    let line = s.line.unwrap_or_else(|| default_line(s.dim));
    let reports = family
        .iter()
        .enumerate()
        .map(|(i, c)| verify_separation(&target, i, c, &line, s.width))
        .collect::<sepcalc::Result<Vec<_>>>()?;
    if output.svg.is_some() {
        // the closest candidate, drawn against the target
        let best = reports.iter().min_by(|a, b| a.l1.low.cmp(&b.l1.low)).expect("non-empty family");
        let g = family[best.id].along(&line)?;
        write_svg(output, &[("target", &target.f), ("closest", &g)])?;
    }
    let text = match output.out {
        Format::Csv => {
            let mut t = format!("{CSV_HEADER}\n");
            for r in &reports {
                t.push_str(&r.csv_row());
                t.push('\n');
            }
            t
        }
        Format::Json => json(&reports),
    };
    if reports.iter().any(|r| !r.pass || !r.chain) {
        return Err(Exit::Fail(text));
    }
    Ok(text)
}

fn nu(k: u32, out: Format) -> Run {
    let nu = nu_points(k)?;
    Ok(match out {
        Format::Json => json(&nu),
        Format::Csv => {
            let mut s = String::from("i,z,value\n");
            for (i, (z, v)) in nu.points.iter().zip(&nu.values).enumerate() {
                writeln!(s, "{i},{z},{v}").unwrap();
            }
            s
        }
    })
}

fn triangle(net_args: &NetArgs, output: &Output) -> Run {
    let (_, f) = net_args.compiled()?;
    let (lo, hi) = &output.window;
    write_svg(output, &[("f", &f)])?;
    match triangle_check(&f, lo, hi) {
        Ok(cert) => Ok(match output.out {
            Format::Json => json(&cert),
            Format::Csv => {
                let bps: Vec<String> = cert.breakpoints.iter().map(|b| b.to_string()).collect();
                format!("triangle t={} window=[{lo},{hi}] breakpoints={}\n", cert.t, bps.join("; "))
            }
        }),
        Err(r) => Err(Exit::Fail(format!("rejected: {}\n", r.reason))),
    }
}

fn vc(a: &VcArgs) -> Run {
    let mut q = CapacityQuery { p: a.p, l: a.l, m: a.m, t: a.t, alpha: a.alpha, beta: a.beta, n: a.n, delta: a.delta.clone() };
    if let Some(spec) = &a.net {
        q = CapacityQuery::from_profile(&load_net(spec)?.profile(), a.n, a.delta.clone());
    }
    let mut rows: Vec<(&str, String)> = vec![
        ("p", q.p.to_string()),
        ("l", q.l.to_string()),
        ("m", q.m.to_string()),
        ("t", q.t.to_string()),
        ("alpha", q.alpha.to_string()),
        ("beta", q.beta.to_string()),
        ("n", q.n.to_string()),
        ("delta", q.delta.to_string()),
        ("vc_bound", show(&vc_bound(&q)?)),
    ];
    match growth_bound(&q) {
        Ok(g) => {
            rows.push(("growth_bound", show(&g.sh)));
            rows.push(("growth_regions", show(&g.regions)));
            rows.push(("random_label_bound", show(&random_label_bound(&g.sh, q.n, &q.delta)?)));
        }
        Err(e) => rows.push(("growth_bound", csv_field(&format!("undefined: {e}")))),
    }
    rows.push(("region_count_bound", show(&region_count_bound(a.q.unwrap_or(q.t), q.alpha, q.p)?)));
    rows.push(("sample_threshold", show(&sample_threshold(&q)?)));
    rows.push(("min_samples", min_samples(&q)?.to_string()));
    Ok(match a.out {
        Format::Json => json(&rows.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<BTreeMap<_, _>>()),
        Format::Csv => {
            let mut s = String::from("quantity,value\n");
            for (k, v) in rows {
                writeln!(s, "{k},{v}").unwrap();
            }
            s
        }
    })
}

struct LabelRun<'a> {
    net: Option<&'a str>,
    n: u64,
    trials: u64,
    seed: u64,
    delta: Rat,
    constant: Option<u8>,
}

fn labels(l: LabelRun, out: Format) -> Run {
    let net = match l.net {
        Some(spec) => load_net(spec)?,
        None => threshold_net(),
    };
    let mode = match l.constant {
        None => LabelMode::Uniform,
        Some(b @ (0 | 1)) => LabelMode::Constant(b),
        Some(b) => return Err(Exit::Usage(format!("--constant must be 0 or 1, got {b}"))),
    };
    let cfg = ExperimentConfig { n: l.n, trials: l.trials, seed: l.seed, delta: l.delta, mode };
    let report = random_label_experiment(&net, &cfg, None)?;
    let text = match out {
        Format::Csv => report.to_csv(),
        Format::Json => json(&report),
    };
    if !report.pass && !report.diagnostic {
        return Err(Exit::Fail(text));
    }
    Ok(text)
}

fn repeat(k: usize, signal: &str, output: &Output) -> Run {
    let g = if signal == "tent" {
        triangle_relu().compile()?.output
    } else {
        let net = load_net(signal)?;
        if net.dim() != 1 {
            return Err(Exit::Usage("the signal must have one input".into()));
        }
        net.compile()?.output
    };
    let h = repeat_signal(&g, k)?;
    write_svg(output, &[("h", &h), ("g", &g)])?;
    Ok(piece_table(&h, output.out))
}

fn run(cli: Cli) -> Run {
    match &cli.cmd {
        Cmd::Compile { net, output } => compile(net, output),
        Cmd::Crossings { net, output } => crossings(net, output),
        Cmd::L1 { net, candidate, width, output } => l1(net, candidate, width, output),
        Cmd::Separation { k, candidates, seed, dim, line, width, output } => separation(
            SeparationRun { k: *k, name: candidates, seed: *seed, dim: *dim, line: line.clone(), width },
            output,
        ),
        Cmd::Nu { k, out } => nu(*k, *out),
        Cmd::Triangle { net, output } => triangle(net, output),
        Cmd::Vc(a) => vc(a),
        Cmd::Labels { net, n, trials, seed, delta, constant, out } => labels(
            LabelRun { net: net.as_deref(), n: *n, trials: *trials, seed: *seed, delta: delta.clone(), constant: *constant },
            *out,
        ),
        Cmd::Repeat { k, signal, output } => repeat(*k, signal, output),
    }
}

/// Write to stdout, tolerating a closed pipe (`sepcalc … | head`).
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            emit(&text);
            ExitCode::SUCCESS
        }
        Err(Exit::Fail(text)) => {
            emit(&text);
            ExitCode::from(1)
        }
        Err(Exit::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
