//! Command-line front end: argument parsing, input files and report rendering.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use matcube::constants::{self, tau_star, tau_star_closed, DEFAULT_SAMPLES, MAX_MC_DIM};
use matcube::constructions::{net_inequality, optimal_assemblage, pauli_inequality, unitary_net};
use matcube::linalg::json::MatrixJson;
use matcube::sdp::Settings;
use matcube::spectrahedra::{self, SpectrahedronTuple, TupleJson};
use matcube::steering::{
    self, Assemblage, AssemblageJson, JmDecision, NoiseDirection, PovmCollection, PovmJson,
    SteeringInequality,
};
use matcube::RandomStream;

pub const MIN_SAMPLES: usize = 1_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Parser, Serialize)]
#[command(name = "matcube", version, about = "Steering inequalities, matrix-cube inclusion and τ*(d)")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Monte-Carlo sample count (at least 1000).
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Target infeasibility of the SDP solver.
    #[arg(long = "sdp-tol", global = true, default_value_t = 1e-8)]
    pub sdp_tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// τ*(d) in closed form and by Monte Carlo.
    Tau {
        #[arg(long, num_args = 1.., required = true)]
        d: Vec<usize>,
        /// Skip the Monte-Carlo estimate.
        #[arg(long)]
        no_mc: bool,
    },
    /// Classical and quantum values of an inequality file.
    Value {
        input: PathBuf,
        /// Also run the see-saw lower bound with this ancilla dimension.
        #[arg(long)]
        seesaw: Option<usize>,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
    },
    /// Matrix-cube inclusion for a spectrahedron tuple file.
    Inclusion { input: PathBuf },
    /// The anticommuting inequality with g measurements.
    Pauli {
        #[arg(long)]
        g: usize,
    },
    /// Haar-net inequalities and their certified ratio.
    Netopt {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long = "K", num_args = 1.., required = true)]
        k: Vec<usize>,
        #[arg(long, default_value_t = 4096)]
        pool: usize,
        #[arg(long, default_value_t = matcube::constructions::DEFAULT_GRID_LEVEL)]
        grid: usize,
    },
    /// LHS decision for an assemblage file.
    Lhs { input: PathBuf },
    /// White-noise threshold of a POVM or assemblage file along a direction.
    Robustness {
        input: PathBuf,
        /// Comma-separated components in [0, 1]; defaults to all ones.
        #[arg(long, value_delimiter = ',')]
        direction: Vec<f64>,
    },
    /// Per-instance upper bounds on the inclusion region along directions.
    Region {
        /// JSON list of direction vectors.
        #[arg(long)]
        directions: PathBuf,
        /// Tuple files, each holding one tuple or a list of tuples.
        #[arg(long, num_args = 1.., required = true)]
        corpus: Vec<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Tau { .. } => "tau",
            Self::Value { .. } => "value",
            Self::Inclusion { .. } => "inclusion",
            Self::Pauli { .. } => "pauli",
            Self::Netopt { .. } => "netopt",
            Self::Lhs { .. } => "lhs",
            Self::Robustness { .. } => "robustness",
            Self::Region { .. } => "region",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed configuration or input file (exit 2).
    Input(String),
    /// Failure inside the library (exit 1).
    Module(matcube::Error),
}

impl From<matcube::Error> for CliError {
    fn from(e: matcube::Error) -> Self {
        Self::Module(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) => 2,
            Self::Module(_) => 1,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Self::Input(m) => serde_json::json!({ "kind": "malformed-input", "message": m }),
            Self::Module(e) => serde_json::json!({ "kind": e.kind(), "message": e.to_string() }),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// A rendered report and the process exit code.
#[derive(Debug)]
pub struct Report {
    pub code: u8,
    pub text: String,
}

struct Output {
    result: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

/// Runs one subcommand. Errors are reported as JSON on the returned text
/// regardless of the requested format.
pub fn run(cfg: &RunConfig) -> Report {
    match dispatch(cfg) {
        Ok(out) => Report {
            code: 0,
            text: render(cfg, &out),
        },
        Err(e) => {
            let body = serde_json::json!({
                "command": cfg.command.name(),
                "config": to_value(cfg),
                "seed": cfg.seed,
                "error": e.to_json(),
            });
            Report {
                code: e.exit_code(),
                text: format!("{}\n", serde_json::to_string_pretty(&body).expect("json")),
            }
        }
    }
}

fn render(cfg: &RunConfig, out: &Output) -> String {
    match cfg.format {
        Format::Json => {
            let body = serde_json::json!({
                "command": cfg.command.name(),
                "config": to_value(cfg),
                "seed": cfg.seed,
                "result": out.result,
            });
            format!("{}\n", serde_json::to_string_pretty(&body).expect("json"))
        }
        Format::Csv => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "# matcube {} seed={} config={}",
                cfg.command.name(),
                cfg.seed,
                serde_json::to_string(&to_value(cfg)).expect("json")
            );
            let _ = writeln!(s, "{}", out.header.join(","));
            for r in &out.rows {
                let _ = writeln!(s, "{}", r.join(","));
            }
            s
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Library-side validation of a file's contents is still a malformed input.
fn parse_with<J, T>(path: &Path, f: impl FnOnce(&J) -> matcube::Result<T>) -> CliResult<T>
where
    J: DeserializeOwned,
{
    let j: J = read_json(path)?;
    f(&j).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn settings(cfg: &RunConfig) -> CliResult<Settings> {
    if !(cfg.sdp_tol > 0.0 && cfg.sdp_tol < 1e-2) {
        return Err(CliError::Input(format!("--sdp-tol {} outside (0, 1e-2)", cfg.sdp_tol)));
    }
    Ok(Settings {
        tol: cfg.sdp_tol,
        ..Settings::default()
    })
}

fn dispatch(cfg: &RunConfig) -> CliResult<Output> {
    let st = settings(cfg)?;
    match &cfg.command {
        Command::Tau { d, no_mc } => tau(cfg, d, *no_mc),
        Command::Value { input, seesaw, restarts } => value(cfg, &st, input, *seesaw, *restarts),
        Command::Inclusion { input } => inclusion(&st, input),
        Command::Pauli { g } => pauli(&st, *g),
        Command::Netopt { d, k, pool, grid } => netopt(cfg, *d, k, *pool, *grid),
        Command::Lhs { input } => lhs(&st, input),
        Command::Robustness { input, direction } => robustness(&st, input, direction),
        Command::Region { directions, corpus } => region(&st, directions, corpus),
    }
}

#[derive(Serialize)]
struct TauRow {
    d: usize,
    closed_exact: String,
    closed: f64,
    asymptotic_ratio: f64,
    mc: Option<constants::TauEstimate>,
    deviation_sigma: Option<f64>,
}

fn tau(cfg: &RunConfig, ds: &[usize], no_mc: bool) -> CliResult<Output> {
    if !no_mc && cfg.samples < MIN_SAMPLES {
        return Err(CliError::Input(format!("--samples must be at least {MIN_SAMPLES}")));
    }
    let mut rows = Vec::new();
    for &d in ds {
        let exact = tau_star_closed(d)?;
        let closed = tau_star(d)?;
        let mc = if no_mc || d > MAX_MC_DIM {
            None
        } else {
            Some(constants::tau_star_mc(d, cfg.samples, &RandomStream::new(cfg.seed, d as u64))?)
        };
        rows.push(TauRow {
            d,
            closed_exact: format!("{}/{}", exact.numer(), exact.denom()),
            closed,
            asymptotic_ratio: constants::tau_asymptotic_ratio(d)?,
            deviation_sigma: mc.map(|e| (e.value - closed).abs() / e.stderr),
            mc,
        });
    }
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    Ok(Output {
        header: vec!["d", "closed_exact", "closed", "mc", "stderr", "k_argmin", "deviation_sigma"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.d.to_string(),
                    r.closed_exact.clone(),
                    num(r.closed),
                    opt(r.mc.map(|e| e.value)),
                    opt(r.mc.map(|e| e.stderr)),
                    r.mc.map(|e| e.k_argmin.to_string()).unwrap_or_default(),
                    opt(r.deviation_sigma),
                ]
            })
            .collect(),
        result: to_value(&rows),
    })
}

#[derive(Serialize)]
struct Values {
    g: usize,
    d: usize,
    unbiased: bool,
    vl: f64,
    vq: f64,
    violation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    seesaw: Option<f64>,
}

fn value_row(v: &Values) -> Vec<String> {
    vec![
        v.g.to_string(),
        v.d.to_string(),
        num(v.vl),
        num(v.vq),
        num(v.violation),
        v.seesaw.map(num).unwrap_or_default(),
    ]
}

const VALUE_HEADER: [&str; 6] = ["g", "d", "vl", "vq", "violation", "seesaw"];

fn values_of(f: &SteeringInequality, st: &Settings) -> CliResult<Values> {
    let vl = steering::vl_value(f)?;
    let vq = steering::vq_value_with(f, st)?;
    Ok(Values {
        g: f.g,
        d: f.d,
        unbiased: f.is_unbiased(),
        vl,
        vq,
        violation: steering::ratio(vq, vl)?,
        seesaw: None,
    })
}

fn value(cfg: &RunConfig, st: &Settings, input: &Path, seesaw: Option<usize>, restarts: usize) -> CliResult<Output> {
    let f = parse_with(input, SteeringInequality::from_json)?;
    let mut v = values_of(&f, st)?;
    if let Some(n) = seesaw {
        v.seesaw = Some(steering::vq_seesaw(&f, n, restarts, &RandomStream::new(cfg.seed, 0))?);
    }
    Ok(Output {
        header: VALUE_HEADER.to_vec(),
        rows: vec![value_row(&v)],
        result: to_value(&v),
    })
}

#[derive(Serialize)]
struct InclusionReport {
    g: usize,
    d: usize,
    /// Whether the input had to be brought to monic form first.
    normalized: bool,
    level1_value: f64,
    level1_included: bool,
    t_min: f64,
    /// `null` when every `B_i` vanishes (inclusion at all scales).
    max_scale: Option<f64>,
    certificate: f64,
    relative_gap: f64,
    dual_state: MatrixJson,
}

fn inclusion(st: &Settings, input: &Path) -> CliResult<Output> {
    let t = parse_with(input, |j: &TupleJson| SpectrahedronTuple::from_json(j))?;
    let monic = if t.monic { t.clone() } else { spectrahedra::normalize_nonmonic(&t)? };
    let r = spectrahedra::cube_inclusion_with(&monic, st)?;
    let l1 = spectrahedra::level1_value(&monic)?;
    let rep = InclusionReport {
        g: monic.g,
        d: monic.d,
        normalized: !t.monic,
        level1_value: l1,
        level1_included: l1 <= 1.0 + spectrahedra::MEMBERSHIP_TOL,
        t_min: r.t_min,
        max_scale: r.max_scale.is_finite().then_some(r.max_scale),
        certificate: r.certificate,
        relative_gap: r.relative_gap,
        dual_state: MatrixJson::from_hermitian(&r.dual_state),
    };
    Ok(Output {
        header: vec!["g", "d", "level1_value", "t_min", "max_scale", "certificate", "relative_gap"],
        rows: vec![vec![
            rep.g.to_string(),
            rep.d.to_string(),
            num(l1),
            num(rep.t_min),
            rep.max_scale.map(num).unwrap_or_else(|| "inf".into()),
            num(rep.certificate),
            num(rep.relative_gap),
        ]],
        result: to_value(&rep),
    })
}

#[derive(Serialize)]
struct PauliReport {
    #[serde(flatten)]
    values: Values,
    optimal_assemblage_value: f64,
}

fn pauli(st: &Settings, g: usize) -> CliResult<Output> {
    let f = pauli_inequality(g)?;
    let values = values_of(&f, st)?;
    let a = optimal_assemblage(g)?;
    let rep = PauliReport {
        optimal_assemblage_value: steering::assemblage_value(&f, &a)?,
        values,
    };
    Ok(Output {
        header: VALUE_HEADER.to_vec(),
        rows: vec![value_row(&rep.values)],
        result: to_value(&rep),
    })
}

#[derive(Serialize)]
struct NetRow {
    #[serde(rename = "K")]
    k: usize,
    d: usize,
    pool: usize,
    delta: f64,
    vl_upper: f64,
    vl_certified: bool,
    vq_lower: f64,
    ratio: f64,
}

fn netopt(cfg: &RunConfig, d: usize, ks: &[usize], pool: usize, grid: usize) -> CliResult<Output> {
    let mut rows = Vec::new();
    for &k in ks {
        let rng = RandomStream::new(cfg.seed, k as u64);
        let net = unitary_net(d, k, pool, &rng)?;
        let ineq = net_inequality(&net, grid, &rng.split(1000))?;
        rows.push(NetRow {
            k,
            d,
            pool,
            delta: net.delta,
            vl_upper: ineq.vl_upper,
            vl_certified: ineq.vl_certified,
            vq_lower: ineq.vq_lower,
            ratio: ineq.ratio(),
        });
    }
    Ok(Output {
        header: vec!["K", "d", "pool", "delta", "vl_upper", "vl_certified", "vq_lower", "ratio"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.k.to_string(),
                    r.d.to_string(),
                    r.pool.to_string(),
                    num(r.delta),
                    num(r.vl_upper),
                    r.vl_certified.to_string(),
                    num(r.vq_lower),
                    num(r.ratio),
                ]
            })
            .collect(),
        result: to_value(&rows),
    })
}

#[derive(Serialize)]
struct Decision {
    decision: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin: Option<f64>,
}

fn decision(j: &JmDecision) -> Decision {
    Decision {
        decision: j.label(),
        margin: match j {
            JmDecision::Yes { .. } => None,
            JmDecision::No { margin } | JmDecision::Undecided { margin } => Some(*margin),
        },
    }
}

#[derive(Serialize)]
struct LhsReport {
    g: usize,
    d: usize,
    has_lhs: Decision,
    /// Dimension of the support of the average state.
    support_dim: usize,
}

fn lhs(st: &Settings, input: &Path) -> CliResult<Output> {
    let a = parse_with(input, Assemblage::from_json)?;
    let img = steering::assemblage_to_povms(&a)?;
    let dec = steering::jointly_measurable_with(&img.povms, st)?;
    let rep = LhsReport {
        g: a.g,
        d: a.d,
        has_lhs: decision(&dec),
        support_dim: img.povms.n,
    };
    Ok(Output {
        header: vec!["g", "d", "has_lhs", "margin"],
        rows: vec![vec![
            rep.g.to_string(),
            rep.d.to_string(),
            rep.has_lhs.decision.into(),
            rep.has_lhs.margin.map(num).unwrap_or_default(),
        ]],
        result: to_value(&rep),
    })
}

fn read_povms(path: &Path) -> CliResult<PovmCollection> {
    let v: Value = read_json(path)?;
    let bad = |e: matcube::Error| CliError::Input(format!("{}: {e}", path.display()));
    let json = |e: serde_json::Error| CliError::Input(format!("{}: {e}", path.display()));
    if v.get("Eplus").is_some() {
        let j: PovmJson = serde_json::from_value(v).map_err(json)?;
        PovmCollection::from_json(&j).map_err(bad)
    } else {
        let j: AssemblageJson = serde_json::from_value(v).map_err(json)?;
        let a = Assemblage::from_json(&j).map_err(bad)?;
        Ok(steering::assemblage_to_povms(&a)?.povms)
    }
}

#[derive(Serialize)]
struct RobustnessReport {
    g: usize,
    n: usize,
    direction: Vec<f64>,
    threshold: f64,
    noiseless: Decision,
}

fn robustness(st: &Settings, input: &Path, direction: &[f64]) -> CliResult<Output> {
    let p = read_povms(input)?;
    let dir = if direction.is_empty() { vec![1.0; p.g] } else { direction.to_vec() };
    if dir.len() != p.g {
        return Err(CliError::Input(format!("direction has {} components for g = {}", dir.len(), p.g)));
    }
    let nd = NoiseDirection::new(dir.clone()).map_err(|e| CliError::Input(e.to_string()))?;
    let rep = RobustnessReport {
        g: p.g,
        n: p.n,
        threshold: steering::noise_threshold_with(&p, &nd, st)?,
        noiseless: decision(&steering::jointly_measurable_with(&p, st)?),
        direction: dir,
    };
    Ok(Output {
        header: vec!["g", "n", "direction", "threshold", "noiseless"],
        rows: vec![vec![
            rep.g.to_string(),
            rep.n.to_string(),
            rep.direction.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";"),
            num(rep.threshold),
            rep.noiseless.decision.into(),
        ]],
        result: to_value(&rep),
    })
}

#[derive(Serialize)]
struct RegionDirection {
    s: Vec<f64>,
    /// `1/t_min` of each instance along `s`: `λ·s ∈ Δ` forces `λ` below it.
    instance_max_scales: Vec<Option<f64>>,
    /// Minimum over the corpus; an upper bound on Δ□(g, d) along `s`, not Δ□ itself.
    upper_bound: Option<f64>,
    /// Lower references: `1/‖s‖₂` (quarter circle) and `τ*(d)/‖s‖∞`.
    quarter_circle: f64,
    tau_star: f64,
}

#[derive(Serialize)]
struct RegionReport {
    g: usize,
    d: usize,
    instances: usize,
    directions: Vec<RegionDirection>,
}

fn read_corpus(paths: &[PathBuf]) -> CliResult<Vec<SpectrahedronTuple>> {
    let mut out = Vec::new();
    for p in paths {
        let v: Value = read_json(p)?;
        let items = match v {
            Value::Array(a) => a,
            other => vec![other],
        };
        for it in items {
            let j: TupleJson =
                serde_json::from_value(it).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            out.push(SpectrahedronTuple::from_json(&j).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?);
        }
    }
    if out.is_empty() {
        return Err(CliError::Input("empty corpus".into()));
    }
    Ok(out)
}

fn region(st: &Settings, directions: &Path, corpus: &[PathBuf]) -> CliResult<Output> {
    let dirs: Vec<Vec<f64>> = read_json(directions)?;
    let tuples = read_corpus(corpus)?;
    // Monic and scaled so the level-1 cube is exactly included.
    let mut inst = Vec::new();
    for t in &tuples {
        let m = if t.monic { t.clone() } else { spectrahedra::normalize_nonmonic(t)? };
        let l1 = spectrahedra::level1_value(&m)?;
        if l1 <= 0.0 {
            return Err(CliError::Input("corpus tuple with vanishing level-1 value".into()));
        }
        inst.push(m.scaled(1.0 / l1));
    }
    let (g, d) = (inst[0].g, inst[0].d);
    if inst.iter().any(|t| t.g != g || t.d != d) {
        return Err(CliError::Input("all corpus tuples must share (g, d)".into()));
    }
    let tau = tau_star(d)?;
    let mut report = RegionReport {
        g,
        d,
        instances: inst.len(),
        directions: Vec::new(),
    };
    let mut rows = Vec::new();
    for (k, s) in dirs.iter().enumerate() {
        if s.len() != g || s.iter().any(|x| !(0.0..=1.0).contains(x)) || s.iter().all(|&x| x == 0.0) {
            return Err(CliError::Input(format!("direction {k} must be a nonzero vector in [0,1]^{g}")));
        }
        let s_str = s.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";");
        let mut scales = Vec::new();
        for (i, b) in inst.iter().enumerate() {
            let sb = SpectrahedronTuple::monic(b.a.iter().zip(s).map(|(a, &si)| a.scale(si)).collect())?;
            let r = spectrahedra::cube_inclusion_with(&sb, st)?;
            let v = r.max_scale.is_finite().then_some(r.max_scale);
            rows.push(vec!["instance".into(), k.to_string(), i.to_string(), s_str.clone(), v.map(num).unwrap_or("inf".into())]);
            scales.push(v);
        }
        let upper = scales.iter().flatten().copied().reduce(f64::min);
        let qc = 1.0 / s.iter().map(|x| x * x).sum::<f64>().sqrt();
        let ts = tau / s.iter().copied().fold(0.0, f64::max);
        for (kind, v) in [("upper_bound", upper.map(num).unwrap_or("inf".into())), ("quarter_circle", num(qc)), ("tau_star", num(ts))] {
            rows.push(vec![kind.into(), k.to_string(), String::new(), s_str.clone(), v]);
        }
        report.directions.push(RegionDirection {
            s: s.clone(),
            instance_max_scales: scales,
            upper_bound: upper,
            quarter_circle: qc,
            tau_star: ts,
        });
    }
    Ok(Output {
        header: vec!["kind", "direction", "instance", "s", "value"],
        rows,
        result: to_value(&report),
    })
}
