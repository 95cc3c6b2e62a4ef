//! `smallforms`: seeded, config-driven experiment runs.
//!
//! Every run reads an optional JSON config, applies flag overrides, and
//! writes its CSV/JSON artifacts plus `run.json` into `--out`. Nothing is
//! written unless the whole run succeeds.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use smallforms::approx::{classify, dimension_lower_bound};
use smallforms::curves::{fiber_substitution, CurveSpec, MultiPoly, RationalText};
use smallforms::exact::format_rational;
use smallforms::io;
use smallforms::measure::{dichotomy_experiment, solution_cells, SampleRegion, ThetaTuple};
use smallforms::solver::{canonical_form_at, coefficient_box_size, default_delta0, dirichlet_witness, enumerate_solutions};
use smallforms::ubiquity::{calibrate_eta, covering_fraction, resonant_points, UbiquityConfig, ETA_EXPONENTS};
use smallforms::{ApproxFunction, Backend, Error, Form, Point, Rational, SolverConfig, SystemMap, SystemSpec};

const SCHEMA_HINT: &str = "run `smallforms help <subcommand>` for flags; configs are JSON objects with keys \
system, psi, point, seed, backend, h_max, t, t_max, samples, region, delta0, eta, levels, cutoffs, form, j, \
n, m, d, tau, theta, fiber";

#[derive(Parser, Debug)]
#[command(name = "smallforms", version, about = "Experiments on simultaneously small linear forms")]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "smallforms-out")]
    out: PathBuf,
    #[arg(long, global = true, value_parser = ["exhaustive", "lattice"])]
    backend: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct Common {
    /// Veronese system degree (overrides the config system).
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    /// Power-law exponent of Ψ(h) = c·h^{−τ}(1 + ln h)^{−κ}.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the Khintchine sum and write partial sums.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated cutoffs.
        #[arg(long)]
        cutoffs: Option<String>,
    },
    /// Enumerate solutions at a point.
    Enumerate {
        #[command(flatten)]
        common: Common,
        /// Point coordinates, e.g. "1/3,0.25".
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        h_max: Option<u64>,
    },
    /// Dirichlet witness at a point and block.
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        t: Option<u32>,
        #[arg(long)]
        delta0: Option<f64>,
    },
    /// Monte Carlo per-block hit statistics.
    Dichotomy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t_max: Option<u32>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Solution cells of one form, or of all forms up to a height.
    Cells {
        #[command(flatten)]
        common: Common,
        /// Comma-separated coefficients.
        #[arg(long)]
        form: Option<String>,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long)]
        h_max: Option<u64>,
    },
    /// Resonant points and covering fractions.
    Ubiquity {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: Option<u32>,
        /// Fixed η; without it η is calibrated over `--levels`.
        #[arg(long)]
        eta: Option<f64>,
        /// Comma-separated levels for calibration.
        #[arg(long)]
        levels: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        delta0: Option<f64>,
    },
    /// Lower bound for the Hausdorff dimension.
    Dimension {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        d: Option<u32>,
    },
    /// Fibering substitution from the config's `fiber` section.
    Fiber,
    /// θ-tuple diagnostics; groups separated by ';', entries by ','.
    Theta {
        #[arg(long)]
        theta: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Enumerate { .. } => "enumerate",
            Command::Witness { .. } => "witness",
            Command::Dichotomy { .. } => "dichotomy",
            Command::Cells { .. } => "cells",
            Command::Ubiquity { .. } => "ubiquity",
            Command::Dimension { .. } => "dimension",
            Command::Fiber => "fiber",
            Command::Theta { .. } => "theta",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RegionSpec {
    lo: Vec<RationalText>,
    hi: Vec<RationalText>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FiberSpec {
    vars: usize,
    /// Each coordinate is a list of `[exponents, coefficient]` terms.
    coords: Vec<Vec<(Vec<u32>, RationalText)>>,
    u: Vec<RationalText>,
    #[serde(default = "two")]
    d: u32,
    #[serde(default = "sixteen")]
    d_cap: u32,
    #[serde(default)]
    domain: Option<Vec<(RationalText, RationalText)>>,
}

fn two() -> u32 {
    2
}

fn sixteen() -> u32 {
    16
}

/// The effective configuration of one run; hashed into the manifest.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RunConfig {
    system: Option<SystemSpec>,
    psi: Option<ApproxFunction>,
    point: Option<String>,
    seed: Option<u64>,
    backend: Option<Backend>,
    h_max: Option<u64>,
    t: Option<u32>,
    t_max: Option<u32>,
    samples: Option<usize>,
    region: Option<RegionSpec>,
    delta0: Option<f64>,
    eta: Option<f64>,
    levels: Option<Vec<u32>>,
    cutoffs: Option<Vec<u64>>,
    form: Option<Vec<i64>>,
    j: Option<usize>,
    n: Option<u32>,
    m: Option<u32>,
    d: Option<u32>,
    tau: Option<f64>,
    theta: Option<Vec<Vec<f64>>>,
    fiber: Option<FiberSpec>,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Lib(e) => match e {
                Error::WorkLimit { .. } => 3,
                Error::Invariant(_) | Error::NoWitness { .. } | Error::Overflow { .. } => 4,
                _ => 2,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Lib(e) => write!(f, "{e}"),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn config_err<T>(msg: impl Into<String>) -> Run<T> {
    Err(Failure::Config(msg.into()))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Run<Vec<T>> {
    s.split(',')
        .map(|v| v.trim().parse().map_err(|_| Failure::Config(format!("bad {what} entry {v:?}"))))
        .collect()
}

fn parse_theta(s: &str) -> Run<Vec<Vec<f64>>> {
    s.split(';').map(|g| parse_list(g, "θ")).collect()
}

/// Artifacts produced by a run, written only once everything succeeded.
struct Outputs {
    files: Vec<(String, Vec<u8>)>,
    summary: String,
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> smallforms::Result<()>) -> Run<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

impl RunConfig {
    fn load(path: Option<&Path>) -> Run<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
    }

    fn apply_common(&mut self, c: &Common) -> Run<()> {
        if c.n.is_some() {
            self.n = c.n;
        }
        if c.m.is_some() {
            self.m = c.m;
        }
        if let Some(tau) = c.tau {
            self.tau = Some(tau);
            let psi = match c.kappa {
                Some(kappa) => ApproxFunction::log_power_law(c.c.unwrap_or(1.0), tau, kappa)?,
                None => ApproxFunction::power_law(c.c.unwrap_or(1.0), tau)?,
            };
            self.psi = Some(psi);
        } else if c.c.is_some() || c.kappa.is_some() {
            return config_err("--c and --kappa need --tau");
        }
        if let (Some(n), Some(m)) = (c.n, c.m.or(self.m).or(Some(1))) {
            let interval = match &self.system {
                Some(SystemSpec::Veronese { veronese }) => veronese.interval.clone(),
                _ => (RationalText::Text("-1/2".into()), RationalText::Text("1/2".into())),
            };
            self.m = Some(m);
            self.system = Some(SystemSpec::Veronese {
                veronese: smallforms::curves::VeroneseSpec { n: n as usize, m: m as usize, interval },
            });
        }
        Ok(())
    }

    fn system(&self) -> Run<SystemMap> {
        match &self.system {
            Some(s) => Ok(s.build()?),
            None => config_err("no system given (use `system` in the config or --n/--m)"),
        }
    }

    fn psi(&self) -> Run<ApproxFunction> {
        self.psi.clone().ok_or_else(|| Failure::Config("no Ψ given (use `psi` in the config or --tau)".into()))
    }

    fn point(&self) -> Run<Point> {
        match &self.point {
            Some(p) => Ok(Point::parse(p)?),
            None => config_err("no point given (use `point` or --point)"),
        }
    }

    fn solver(&self) -> SolverConfig {
        let mut s = SolverConfig::default();
        if let Some(b) = self.backend {
            s.backend = b;
        }
        if let Some(h) = self.h_max {
            s.h_max = h;
        }
        s
    }

    fn region(&self, system: &SystemMap, samples: usize, seed: u64) -> Run<SampleRegion> {
        match &self.region {
            None => Ok(SampleRegion::of_system(system, samples, seed)),
            Some(r) => {
                let lo = r.lo.iter().map(RationalText::value).collect::<smallforms::Result<Vec<Rational>>>()?;
                let hi = r.hi.iter().map(RationalText::value).collect::<smallforms::Result<Vec<Rational>>>()?;
                let region = SampleRegion::new(lo, hi, samples, seed)?;
                region.check_inside(system)?;
                Ok(region)
            }
        }
    }

    fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

fn dims(cfg: &RunConfig) -> Run<(u32, u32)> {
    if let Some(s) = &cfg.system {
        let s = s.build()?;
        return Ok((s.n() as u32, s.m() as u32));
    }
    match (cfg.n, cfg.m) {
        (Some(n), m) => Ok((n, m.unwrap_or(1))),
        _ => config_err("need n and m (--n/--m or a system)"),
    }
}

fn run(command: &Command, cfg: &mut RunConfig) -> Run<Outputs> {
    match command {
        Command::Classify { common, cutoffs } => {
            cfg.apply_common(common)?;
            if let Some(c) = cutoffs {
                cfg.cutoffs = Some(parse_list(c, "cutoff")?);
            }
            let (n, m) = dims(cfg)?;
            let psi = cfg.psi()?;
            let cutoffs = cfg.cutoffs.clone().unwrap_or_else(|| vec![1_000, 10_000, 100_000]);
            let v = classify(&psi, n, m, &cutoffs)?;
            let csv = csv_bytes(|b| io::write_partial_sums(b, &v))?;
            let index = v.index.map_or("n/a".to_string(), |i| i.to_string());
            Ok(Outputs {
                files: vec![("partial_sums.csv".into(), csv)],
                summary: format!("verdict: {}\nthreshold: {}\nindex: {index}", v.classification, v.threshold),
            })
        }
        Command::Enumerate { common, point, h_max } => {
            cfg.apply_common(common)?;
            if point.is_some() {
                cfg.point = point.clone();
            }
            if h_max.is_some() {
                cfg.h_max = *h_max;
            }
            let system = cfg.system()?;
            let sols = enumerate_solutions(&system, &cfg.point()?, &cfg.psi()?, &cfg.solver())?;
            let csv = csv_bytes(|b| io::write_solutions(b, &sols))?;
            Ok(Outputs { files: vec![("solutions.csv".into(), csv)], summary: format!("solutions: {}", sols.len()) })
        }
        Command::Witness { common, point, t, delta0 } => {
            cfg.apply_common(common)?;
            if point.is_some() {
                cfg.point = point.clone();
            }
            if t.is_some() {
                cfg.t = *t;
            }
            if delta0.is_some() {
                cfg.delta0 = *delta0;
            }
            let system = cfg.system()?;
            let t = cfg.t.ok_or_else(|| Failure::Config("no block t given".into()))?;
            let delta0 = cfg.delta0.unwrap_or_else(|| default_delta0(&system));
            let w = dirichlet_witness(&system, &cfg.point()?, t, delta0)?;
            let csv = csv_bytes(|b| io::write_solutions(b, std::slice::from_ref(&w.record)))?;
            Ok(Outputs {
                files: vec![("witness.csv".into(), csv)],
                summary: format!(
                    "witness: {:?} (height {} ≤ {}, max residual {:e} < {:e})",
                    w.record.form.coeffs(),
                    w.record.height(),
                    w.height_bound,
                    w.record.max_residual(),
                    w.value_bound
                ),
            })
        }
        Command::Dichotomy { common, t_max, samples } => {
            cfg.apply_common(common)?;
            if t_max.is_some() {
                cfg.t_max = *t_max;
            }
            if samples.is_some() {
                cfg.samples = *samples;
            }
            let system = cfg.system()?;
            let samples = cfg.samples.unwrap_or(1000);
            if samples < 100 {
                return config_err("dichotomy needs at least 100 samples");
            }
            let region = cfg.region(&system, samples, cfg.seed.unwrap_or(0))?;
            let table = dichotomy_experiment(&system, &cfg.psi()?, &region, cfg.t_max.unwrap_or(9), &cfg.solver())?;
            let csv = csv_bytes(|b| io::write_dichotomy(b, &table))?;
            let failures: Vec<_> = table.failures.iter().map(|(i, e)| format!("{i}: {e}")).collect();
            let mut summary = format!("points: {}, failed points: {}", table.counts.len(), table.failures.len());
            for f in failures.iter().take(5) {
                summary.push_str(&format!("\n  {f}"));
            }
            Ok(Outputs { files: vec![("dichotomy.csv".into(), csv)], summary })
        }
        Command::Cells { common, form, j, h_max } => {
            cfg.apply_common(common)?;
            if let Some(f) = form {
                cfg.form = Some(parse_list(f, "coefficient")?);
            }
            if j.is_some() {
                cfg.j = *j;
            }
            if h_max.is_some() {
                cfg.h_max = *h_max;
            }
            let system = cfg.system()?;
            let psi = cfg.psi()?;
            let j = cfg.j.unwrap_or(0);
            let forms: Vec<Form> = match (&cfg.form, cfg.h_max) {
                (Some(a), _) => vec![Form::new(a.clone())?],
                (None, Some(h)) => {
                    let total = coefficient_box_size(system.n(), h)
                        .filter(|&t| t <= 100_000_000)
                        .ok_or(Error::WorkLimit { requested: u128::MAX, limit: 100_000_000 })?;
                    (0..total).filter_map(|i| canonical_form_at(system.n(), h, i)).collect()
                }
                (None, None) => return config_err("give a form (--form) or a height bound (--h-max)"),
            };
            let mut decomps = Vec::with_capacity(forms.len());
            let mut max_k = 0;
            for f in &forms {
                let d = solution_cells(f, &system, &psi, j)?;
                if !d.length_bound_holds() || d.cells.len() > d.k_bound {
                    return Err(Error::Invariant(format!("cell bound violated for {:?}", f.coeffs())).into());
                }
                max_k = max_k.max(d.cells.len());
                decomps.push(d);
            }
            let csv = csv_bytes(|b| io::write_cells(b, &decomps))?;
            let k_bound = decomps.first().map_or(0, |d| d.k_bound);
            Ok(Outputs {
                files: vec![("cells.csv".into(), csv)],
                summary: format!("forms: {}, max cells per form: {max_k} (bound {k_bound})", forms.len()),
            })
        }
        Command::Ubiquity { common, t, eta, levels, samples, delta0 } => {
            cfg.apply_common(common)?;
            if t.is_some() {
                cfg.t = *t;
            }
            if eta.is_some() {
                cfg.eta = *eta;
            }
            if let Some(l) = levels {
                cfg.levels = Some(parse_list(l, "level")?);
            }
            if samples.is_some() {
                cfg.samples = *samples;
            }
            if delta0.is_some() {
                cfg.delta0 = *delta0;
            }
            let system = cfg.system()?;
            let mut uc = UbiquityConfig::for_system(&system);
            if let Some(d) = cfg.delta0 {
                uc = uc.with_delta0(smallforms::exact::from_f64(d)?);
            }
            if let Some(r) = &cfg.region {
                let lo = r.lo.iter().map(RationalText::value).collect::<smallforms::Result<Vec<_>>>()?;
                let hi = r.hi.iter().map(RationalText::value).collect::<smallforms::Result<Vec<_>>>()?;
                uc = uc.with_omega(lo, hi);
            }
            uc.validate(&system)?;
            let samples = cfg.samples.unwrap_or(10_000);
            let seed = cfg.seed.unwrap_or(0);
            let (lo, hi) = (uc.omega_lo.clone(), uc.omega_hi.clone());
            let t = cfg.t.unwrap_or(6);
            let (eta, table) = match cfg.eta {
                Some(e) => {
                    uc = uc.with_eta(e);
                    let pts = resonant_points(&system, &uc, t)?;
                    (Some(e), vec![covering_fraction(&pts, &uc, t, (&lo, &hi), samples, seed)?])
                }
                None => {
                    let levels = cfg.levels.clone().unwrap_or_else(|| vec![t, t + 1, t + 2]);
                    let cal = calibrate_eta(&system, &uc, &levels, levels.len(), ETA_EXPONENTS, (&lo, &hi), samples, seed)?;
                    (cal.eta, cal.table)
                }
            };
            let points = resonant_points(&system, &uc, t)?;
            let mut json = Vec::new();
            io::write_resonant_json(&mut json, &points)?;
            let csv = csv_bytes(|b| io::write_coverings(b, &table))?;
            let eta_text = eta.map_or("none reaches k0".to_string(), |e| e.to_string());
            Ok(Outputs {
                files: vec![("resonant.json".into(), json), ("covering.csv".into(), csv)],
                summary: format!("resonant points at t = {t}: {}\neta: {eta_text}\nk0: {}", points.len(), uc.k0),
            })
        }
        Command::Dimension { common, d } => {
            cfg.apply_common(common)?;
            if d.is_some() {
                cfg.d = *d;
            }
            let (n, m) = match (cfg.n, cfg.m) {
                (Some(n), Some(m)) => (n, m),
                _ => dims(cfg)?,
            };
            let tau = cfg.tau.ok_or_else(|| Failure::Config("dimension needs --tau".into()))?;
            let d = cfg.d.unwrap_or(m);
            let bound = dimension_lower_bound(n, m, d, tau)?;
            let csv = format!("n,m,d,tau,bound\n{n},{m},{d},{tau},{bound}\n").into_bytes();
            Ok(Outputs { files: vec![("dimension.csv".into(), csv)], summary: bound.to_string() })
        }
        Command::Fiber => {
            let spec = cfg.fiber.clone().ok_or_else(|| Failure::Config("config needs a `fiber` section".into()))?;
            let coords = spec
                .coords
                .iter()
                .map(|terms| {
                    let terms = terms
                        .iter()
                        .map(|(e, c)| Ok((e.clone(), c.value()?)))
                        .collect::<smallforms::Result<Vec<_>>>()?;
                    MultiPoly::new(spec.vars, terms)
                })
                .collect::<smallforms::Result<Vec<_>>>()?;
            let u = spec.u.iter().map(RationalText::value).collect::<smallforms::Result<Vec<_>>>()?;
            let domain = spec
                .domain
                .as_ref()
                .map(|d| d.iter().map(|(a, b)| Ok((a.value()?, b.value()?))).collect::<smallforms::Result<Vec<_>>>())
                .transpose()?;
            let fibered = fiber_substitution(&coords, &u, spec.d, spec.d_cap, domain.as_deref())?;
            let doc = serde_json::json!({
                "curve": CurveSpec::of(&fibered.curve),
                "d": fibered.d,
                "tried": fibered.tried,
            });
            let bytes = serde_json::to_vec_pretty(&doc).map_err(Error::from)?;
            let (lo, hi) = fibered.curve.interval();
            Ok(Outputs {
                files: vec![("fiber.json".into(), bytes)],
                summary: format!("D = {} (tried {:?}), t ∈ [{}, {}]", fibered.d, fibered.tried, format_rational(lo), format_rational(hi)),
            })
        }
        Command::Theta { theta } => {
            if let Some(t) = theta {
                cfg.theta = Some(parse_theta(t)?);
            }
            let groups = cfg.theta.clone().ok_or_else(|| Failure::Config("no θ given (--theta)".into()))?;
            let report = ThetaTuple::new(groups)?.diagnostics();
            let bytes = serde_json::to_vec_pretty(&report).map_err(Error::from)?;
            let bound = report.theta_hat_bound.map_or("inapplicable".to_string(), |b| b.to_string());
            Ok(Outputs {
                files: vec![("theta.json".into(), bytes)],
                summary: format!("theta: {}\nproperty_m: {:?}\ntheta_hat_bound: {bound}", report.theta, report.property_m),
            })
        }
    }
}

fn write_outputs(dir: &Path, outputs: &Outputs, manifest: &serde_json::Value) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, bytes) in &outputs.files {
        fs::write(dir.join(name), bytes)?;
    }
    let mut m = serde_json::to_vec_pretty(manifest).expect("manifest serializes");
    m.push(b'\n');
    fs::write(dir.join("run.json"), m)
}

fn execute(cli: Cli) -> Run<String> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return config_err("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if let Some(b) = &cli.backend {
        cfg.backend = Some(b.parse()?);
    }
    let outputs = run(&cli.command, &mut cfg)?;
    let manifest = serde_json::json!({
        "subcommand": cli.command.name(),
        "config": cfg,
        "config_hash": cfg.hash(),
        "seed": cfg.seed.unwrap_or(0),
        "confidence_intervals": "Wilson score, 95%",
        "outputs": outputs.files.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(),
        "versions": {
            "smallforms": smallforms::VERSION,
            "smallforms-cli": env!("CARGO_PKG_VERSION"),
        },
    });
    write_outputs(&cli.out, &outputs, &manifest).map_err(|e| Failure::Lib(Error::Io(e)))?;
    Ok(outputs.summary)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            if code == 2 {
                eprintln!("{SCHEMA_HINT}");
            }
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {f}");
            if f.exit_code() == 2 {
                eprintln!("{SCHEMA_HINT}");
            }
            ExitCode::from(f.exit_code())
        }
    }
}
