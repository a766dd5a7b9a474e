//! Command-line front end: constant tables, γ-sweeps, verification suites
//! and sharpness experiments, written as JSON or CSV.
//!
//! JSON output is a single object `{config, results, diagnostics}`. CSV
//! output starts with `#`-prefixed lines carrying the config and the
//! diagnostics, followed by a header row and the data. Every numeric cell
//! sits next to the evaluation path that produced it.
//!
//! Exit codes: 0 success, 1 a verification invariant failed, 2 invalid
//! configuration, 3 numerical failure (series or quadrature).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::constants::{
    c_at_angle, c_optimal, closed_form_available, k_value, AngleGamma, ConstantOptions, DirectionKind, Exponent,
    ExponentPair, Regime,
};
use crate::error::Error;
use crate::kernel::{BallPoint, Direction, EvalPath, MonteCarloConfig};
use crate::quadrature::QuadratureSpec;
use crate::sharpness::{bound_violation_scan, sharpness_refinement};
use crate::special::SeriesControl;
use crate::verify::{classify_profile, gamma_grid, run_suites, SuiteName, VerifySettings};

/// Directory used for output files when `--out` is not given.
pub const OUT_DIR_ENV: &str = "SHARPGRAD_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sharpgrad", version, about = "Sharp pointwise gradient constants for hyperbolic harmonic functions")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CommonArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Output file; defaults to stdout, or to $SHARPGRAD_OUT_DIR/<command>.<ext> when set
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized experiments
    #[arg(long, default_value_t = 0x5eed, global = true)]
    pub seed: u64,
    /// Quadrature relative tolerance
    #[arg(long, default_value_t = 1e-12, global = true)]
    pub rel_tol: f64,
    /// Quadrature absolute tolerance
    #[arg(long, default_value_t = 1e-15, global = true)]
    pub abs_tol: f64,
    /// Gauss-Legendre nodes per panel
    #[arg(long, default_value_t = 20, global = true)]
    pub base_order: usize,
    /// Maximum panel bisections per integral
    #[arg(long, default_value_t = 2000, global = true)]
    pub max_refinements: usize,
    /// Series relative tolerance
    #[arg(long, default_value_t = 1e-14, global = true)]
    pub series_tol: f64,
    /// Maximum series terms
    #[arg(long, default_value_t = 100_000, global = true)]
    pub max_terms: usize,
    /// Monte-Carlo sample count
    #[arg(long, default_value_t = 200_000, global = true)]
    pub mc_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathArg {
    SphereQuadrature,
    DiscReduction,
    ClosedForm,
    MonteCarlo,
}

impl From<PathArg> for EvalPath {
    fn from(p: PathArg) -> EvalPath {
        match p {
            PathArg::SphereQuadrature => EvalPath::SphereQuadrature,
            PathArg::DiscReduction => EvalPath::DiscReduction,
            PathArg::ClosedForm => EvalPath::ClosedForm,
            PathArg::MonteCarlo => EvalPath::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PointArgs {
    /// Dimension of the ball (n >= 3)
    #[arg(long)]
    pub n: usize,
    /// Exponent p > 1, or "inf"
    #[arg(long)]
    pub p: String,
    /// |x| in [0, 1)
    #[arg(long)]
    pub x_norm: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// C_p(x) in the optimal direction, or C_p(x; ℓ_γ) with --gamma
    Constant {
        #[command(flatten)]
        #[serde(flatten)]
        point: PointArgs,
        /// Angle between ℓ and x/|x|
        #[arg(long)]
        gamma: Option<f64>,
        /// Force an evaluation path
        #[arg(long, value_enum)]
        path: Option<PathArg>,
    },
    /// K and C along γ_k = kπ/(2 steps), k = 0..=steps
    SweepGamma {
        #[command(flatten)]
        #[serde(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, value_enum)]
        path: Option<PathArg>,
    },
    /// Run the named invariant suites
    Verify {
        /// Dimensions to cover (repeatable)
        #[arg(long = "n", default_values_t = [3usize, 4])]
        dims: Vec<usize>,
        /// Restrict to these suites (comma separated)
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// Attainment ratios of the extremal candidate and a random violation scan
    Sharpness {
        #[command(flatten)]
        #[serde(flatten)]
        point: PointArgs,
        /// Angle of ℓ against x/|x|; defaults to the maximizing direction
        #[arg(long)]
        gamma: Option<f64>,
        /// Refinement levels after the base rule
        #[arg(long, default_value_t = 2)]
        levels: u32,
        /// Random boundary functions in the scan
        #[arg(long, default_value_t = 25)]
        trials: usize,
    },
    /// C_p(x) over a (p, |x|) grid for fixed n
    Table {
        #[arg(long)]
        n: usize,
        /// Exponents (comma separated); defaults to 1.5,2,n,n+2,inf
        #[arg(long, value_delimiter = ',')]
        p: Vec<String>,
        /// Values of |x| (comma separated)
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.3, 0.6, 0.9])]
        x_norm: Vec<f64>,
        #[arg(long, value_enum)]
        path: Option<PathArg>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Constant { .. } => "constant",
            Command::SweepGamma { .. } => "sweep-gamma",
            Command::Verify { .. } => "verify",
            Command::Sharpness { .. } => "sharpness",
            Command::Table { .. } => "table",
        }
    }
}

/// A failed run: exit code plus message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_CONFIG };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Result of a successful command: the JSON document, CSV rows and whether
/// every invariant held.
pub struct Output {
    pub results: Value,
    pub diagnostics: Value,
    pub csv_header: Vec<String>,
    pub csv_rows: Vec<Vec<String>>,
    pub invariants_hold: bool,
}

fn parse_exponent(s: &str) -> Result<ExponentPair, Failure> {
    let p: Exponent = s.parse().map_err(|e: Error| Failure::config(e.to_string()))?;
    ExponentPair::new(p).map_err(|e| Failure::config(e.to_string()))
}

fn check_dim(n: usize) -> Result<(), Failure> {
    if n < 3 {
        return Err(Failure::config(format!("--n must be at least 3, got {n}")));
    }
    Ok(())
}

fn check_norm(r: f64) -> Result<(), Failure> {
    if !(0.0..1.0).contains(&r) {
        return Err(Failure::config(format!("--x-norm must lie in [0, 1), got {r}")));
    }
    Ok(())
}

fn check_gamma(g: Option<f64>) -> Result<(), Failure> {
    match g {
        Some(v) if !v.is_finite() => Err(Failure::config(format!("--gamma must be finite, got {v}"))),
        _ => Ok(()),
    }
}

/// Rejects a forced closed-form path where none exists, before any work.
fn check_path(path: Option<PathArg>, pq: &ExponentPair, n: usize, r: f64, kind: DirectionKind) -> Result<(), Failure> {
    if path == Some(PathArg::ClosedForm) && !closed_form_available(pq.regime(n), kind, r) {
        return Err(Failure::config(format!(
            "no closed form for p = {} (regime {}) in the {kind} direction",
            pq.p(),
            pq.regime(n)
        )));
    }
    Ok(())
}

fn options(common: &CommonArgs, path: Option<PathArg>) -> Result<ConstantOptions, Failure> {
    let quadrature = QuadratureSpec {
        base_order: common.base_order,
        max_refinements: common.max_refinements,
        abs_tol: common.abs_tol,
        rel_tol: common.rel_tol,
    };
    quadrature.validate().map_err(|e| Failure::config(e.to_string()))?;
    let series = SeriesControl::new(common.series_tol, common.max_terms).map_err(|e| Failure::config(e.to_string()))?;
    if common.mc_samples < 2 {
        return Err(Failure::config("--mc-samples must be at least 2"));
    }
    Ok(ConstantOptions {
        quadrature,
        series,
        path: path.map(EvalPath::from),
        monte_carlo: MonteCarloConfig {
            samples: common.mc_samples,
            seed: common.seed,
        },
    })
}

fn angle_kind(pq: &ExponentPair, n: usize, r: f64, gamma: Option<f64>) -> DirectionKind {
    match gamma {
        _ if r == 0.0 => DirectionKind::Any,
        Some(g) => AngleGamma::reduce(g).kind(),
        None => pq.regime(n).maximizing_direction(),
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:.17e}")
}

fn cmd_constant(common: &CommonArgs, point: &PointArgs, gamma: Option<f64>, path: Option<PathArg>) -> Result<Output, Failure> {
    check_dim(point.n)?;
    check_norm(point.x_norm)?;
    check_gamma(gamma)?;
    let pq = parse_exponent(&point.p)?;
    check_path(path, &pq, point.n, point.x_norm, angle_kind(&pq, point.n, point.x_norm, gamma))?;
    let opts = options(common, path)?;
    let report = match gamma {
        Some(g) => c_at_angle(&pq, point.x_norm, AngleGamma::reduce(g), point.n, &opts)?,
        None => c_optimal(&pq, &BallPoint::on_axis(point.n, point.x_norm)?, &opts)?,
    };
    let header = ["value", "k", "gamma", "err_est", "path", "regime", "direction_kind"];
    let row = vec![
        fmt_num(report.value),
        fmt_num(report.k),
        fmt_num(report.gamma),
        fmt_num(report.err_est),
        report.path.to_string(),
        report.regime.to_string(),
        report.direction_kind.to_string(),
    ];
    Ok(Output {
        results: json!([report]),
        diagnostics: json!({
            "regime": report.regime,
            "maximizing_direction": report.regime.maximizing_direction(),
        }),
        csv_header: header.iter().map(|s| s.to_string()).collect(),
        csv_rows: vec![row],
        invariants_hold: true,
    })
}

#[derive(Serialize)]
struct SweepRow {
    gamma: f64,
    k: f64,
    c: f64,
    err_est: f64,
    path: EvalPath,
}

fn cmd_sweep(common: &CommonArgs, point: &PointArgs, steps: usize, path: Option<PathArg>) -> Result<Output, Failure> {
    check_dim(point.n)?;
    check_norm(point.x_norm)?;
    if steps == 0 {
        return Err(Failure::config("--steps must be at least 1"));
    }
    let pq = parse_exponent(&point.p)?;
    let n = point.n;
    let regime = pq.regime(n);
    if path == Some(PathArg::ClosedForm) && point.x_norm > 0.0 && !matches!(regime, Regime::AtN | Regime::Infinity) {
        return Err(Failure::config(format!(
            "a γ-sweep in regime {regime} has no closed form at interior angles"
        )));
    }
    let opts = options(common, path)?;
    let rows = gamma_grid(steps)
        .into_par_iter()
        .map(|g| {
            let gamma = AngleGamma::reduce(g);
            let (k, used) = k_value(&pq, point.x_norm, gamma, n, &opts)?;
            let c = crate::constants::c_from_k(k.value, &pq, point.x_norm, n);
            Ok(SweepRow {
                gamma: g,
                k: k.value,
                c,
                err_est: k.err_est,
                path: used,
            })
        })
        .collect::<Result<Vec<SweepRow>, Error>>()?;
    let ks: Vec<f64> = rows.iter().map(|r| r.k).collect();
    let profile = classify_profile(&ks, 1e-9);
    let (lo, hi) = ks.iter().fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(*v), b.max(*v)));
    let mean = ks.iter().sum::<f64>() / ks.len() as f64;
    let csv_rows = rows
        .iter()
        .map(|r| vec![fmt_num(r.gamma), fmt_num(r.k), fmt_num(r.c), fmt_num(r.err_est), r.path.to_string()])
        .collect();
    Ok(Output {
        results: serde_json::to_value(&rows).expect("rows serialize"),
        diagnostics: json!({
            "regime": regime,
            "predicted_max_direction": regime.maximizing_direction(),
            "observed_profile": profile,
            "relative_spread": (hi - lo) / mean,
        }),
        csv_header: ["gamma", "k", "c", "err_est", "path"].iter().map(|s| s.to_string()).collect(),
        csv_rows,
        invariants_hold: true,
    })
}

fn cmd_verify(common: &CommonArgs, dims: &[usize], only: &[String]) -> Result<Output, Failure> {
    for &n in dims {
        check_dim(n)?;
    }
    let names: Vec<SuiteName> = if only.is_empty() {
        SuiteName::ALL.to_vec()
    } else {
        only.iter()
            .map(|s| s.trim().parse::<SuiteName>().map_err(|e| Failure::config(e.to_string())))
            .collect::<Result<_, _>>()?
    };
    let opts = options(common, None)?;
    let settings = VerifySettings {
        dims: dims.to_vec(),
        quadrature: opts.quadrature,
        series: opts.series,
        seed: common.seed,
    };
    let reports = run_suites(&names, &settings);
    let all = reports.iter().all(|r| r.passed);
    let mut stderr = std::io::stderr().lock();
    for r in reports.iter().filter(|r| !r.passed) {
        for f in &r.failures {
            let _ = writeln!(stderr, "verify: {} failed at {}: {}", r.suite, f.inputs, f.detail);
        }
    }
    let csv_rows = reports
        .iter()
        .map(|r| {
            vec![
                r.suite.to_string(),
                if r.passed { "pass" } else { "fail" }.to_string(),
                r.cases.to_string(),
                r.failures.len().to_string(),
                fmt_num(r.worst),
                fmt_num(r.tolerance),
                r.path.clone(),
            ]
        })
        .collect();
    Ok(Output {
        results: serde_json::to_value(&reports).expect("reports serialize"),
        diagnostics: json!({ "all_passed": all, "suites": names }),
        csv_header: ["suite", "status", "cases", "failures", "worst", "tolerance", "path"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        csv_rows,
        invariants_hold: all,
    })
}

fn cmd_sharpness(
    common: &CommonArgs,
    point: &PointArgs,
    gamma: Option<f64>,
    levels: u32,
    trials: usize,
) -> Result<Output, Failure> {
    check_dim(point.n)?;
    check_norm(point.x_norm)?;
    check_gamma(gamma)?;
    if trials == 0 {
        return Err(Failure::config("--trials must be at least 1"));
    }
    if levels > 4 {
        return Err(Failure::config(format!("--levels must be at most 4, got {levels}")));
    }
    let pq = parse_exponent(&point.p)?;
    let n = point.n;
    let opts = options(common, None)?;
    let x = BallPoint::on_axis(n, point.x_norm)?;
    let g = gamma.unwrap_or(match pq.regime(n).maximizing_direction() {
        DirectionKind::Tangential => 0.5 * std::f64::consts::PI,
        _ => 0.0,
    });
    let l = Direction::in_first_plane(n, g)?;
    let refinement = sharpness_refinement(&pq, &x, &l, &opts.quadrature, levels, &opts)?;
    let scan = bound_violation_scan(&pq, &x, trials, common.seed, &opts.quadrature, &opts)?;

    let mut csv_rows: Vec<Vec<String>> = refinement
        .iter()
        .enumerate()
        .map(|(k, r)| {
            vec![
                "extremal".to_string(),
                k.to_string(),
                fmt_num(r.ratio),
                fmt_num(r.numerator),
                fmt_num(r.constant),
                fmt_num(r.p_norm),
                r.path.to_string(),
                r.constant_path.to_string(),
            ]
        })
        .collect();
    csv_rows.push(vec![
        "scan-max".to_string(),
        scan.worst_trial.to_string(),
        fmt_num(scan.max_ratio),
        String::new(),
        String::new(),
        String::new(),
        EvalPath::MonteCarlo.to_string(),
        String::new(),
    ]);
    let levels_json: Vec<Value> = refinement
        .iter()
        .enumerate()
        .map(|(k, r)| {
            json!({
                "level": k,
                "base_order": opts.quadrature.refined(k as u32).base_order,
                "report": r,
            })
        })
        .collect();
    Ok(Output {
        results: json!({
            "extremal": levels_json,
            "scan": {
                "trials": trials,
                "max_ratio": scan.max_ratio,
                "worst_trial": scan.worst_trial,
                "path": EvalPath::MonteCarlo,
            },
        }),
        diagnostics: json!({
            "regime": pq.regime(n),
            "gamma": g,
            "final_ratio": refinement.last().map(|r| r.ratio),
        }),
        csv_header: ["kind", "index", "ratio", "numerator", "constant", "p_norm", "path", "constant_path"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        csv_rows,
        invariants_hold: true,
    })
}

#[derive(Serialize)]
struct TableCell {
    p: String,
    x_norm: f64,
    value: f64,
    k: f64,
    err_est: f64,
    regime: Regime,
    direction_kind: DirectionKind,
    path: EvalPath,
}

fn cmd_table(common: &CommonArgs, n: usize, ps: &[String], xs: &[f64], path: Option<PathArg>) -> Result<Output, Failure> {
    check_dim(n)?;
    let p_tokens: Vec<String> = if ps.is_empty() {
        let nf = n as f64;
        vec!["1.5".into(), "2".into(), format!("{nf}"), format!("{}", nf + 2.0), "inf".into()]
    } else {
        ps.to_vec()
    };
    let pairs: Vec<(String, ExponentPair)> = p_tokens
        .iter()
        .map(|t| parse_exponent(t).map(|pq| (t.trim().to_string(), pq)))
        .collect::<Result<_, _>>()?;
    if xs.is_empty() {
        return Err(Failure::config("--x-norm needs at least one value"));
    }
    for &r in xs {
        check_norm(r)?;
    }
    for (_, pq) in &pairs {
        for &r in xs {
            check_path(path, pq, n, r, angle_kind(pq, n, r, None))?;
        }
    }
    let opts = options(common, path)?;
    let grid: Vec<(String, ExponentPair, f64)> = pairs
        .iter()
        .flat_map(|(t, pq)| xs.iter().map(move |&r| (t.clone(), *pq, r)))
        .collect();
    let cells = grid
        .into_par_iter()
        .map(|(token, pq, r)| {
            let rep = c_optimal(&pq, &BallPoint::on_axis(n, r)?, &opts)?;
            Ok(TableCell {
                p: token,
                x_norm: r,
                value: rep.value,
                k: rep.k,
                err_est: rep.err_est,
                regime: rep.regime,
                direction_kind: rep.direction_kind,
                path: rep.path,
            })
        })
        .collect::<Result<Vec<TableCell>, Error>>()?;
    let csv_rows = cells
        .iter()
        .map(|c| {
            vec![
                c.p.clone(),
                fmt_num(c.x_norm),
                fmt_num(c.value),
                fmt_num(c.k),
                fmt_num(c.err_est),
                c.regime.to_string(),
                c.direction_kind.to_string(),
                c.path.to_string(),
            ]
        })
        .collect();
    Ok(Output {
        results: serde_json::to_value(&cells).expect("cells serialize"),
        diagnostics: json!({ "n": n, "rows": p_tokens, "columns": xs }),
        csv_header: ["p", "x_norm", "value", "k", "err_est", "regime", "direction_kind", "path"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        csv_rows,
        invariants_hold: true,
    })
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<Output, Failure> {
    let c = &cli.common;
    match &cli.command {
        Command::Constant { point, gamma, path } => cmd_constant(c, point, *gamma, *path),
        Command::SweepGamma { point, steps, path } => cmd_sweep(c, point, *steps, *path),
        Command::Verify { dims, only } => cmd_verify(c, dims, only),
        Command::Sharpness {
            point,
            gamma,
            levels,
            trials,
        } => cmd_sharpness(c, point, *gamma, *levels, *trials),
        Command::Table { n, p, x_norm, path } => cmd_table(c, *n, p, x_norm, *path),
    }
}

/// The resolved configuration, as echoed into every output.
pub fn config_json(cli: &Cli) -> Value {
    json!({
        "command": cli.command,
        "common": cli.common,
    })
}

/// Renders an output document in the requested format.
pub fn render(cli: &Cli, out: &Output) -> Result<String, Failure> {
    let config = config_json(cli);
    match cli.common.format {
        Format::Json => {
            let doc = json!({
                "config": config,
                "results": out.results,
                "diagnostics": out.diagnostics,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("json renders");
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut s = String::new();
            s.push_str(&format!("# config: {config}\n"));
            s.push_str(&format!("# diagnostics: {}\n", out.diagnostics));
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&out.csv_header)
                .and_then(|_| out.csv_rows.iter().try_for_each(|r| w.write_record(r)))
                .map_err(|e| Failure::config(format!("csv: {e}")))?;
            let body = w
                .into_inner()
                .map_err(|e| Failure::config(format!("csv: {e}")))?;
            s.push_str(&String::from_utf8(body).expect("csv is utf-8"));
            Ok(s)
        }
    }
}

fn destination(cli: &Cli) -> Option<PathBuf> {
    if let Some(p) = &cli.common.out {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty())?;
    Some(PathBuf::from(dir).join(format!("{}.{}", cli.command.name(), cli.common.format.extension())))
}

/// Parses `args`, runs the command, writes the output and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(&cli).and_then(|out| {
        let text = render(&cli, &out)?;
        match destination(&cli) {
            Some(path) => {
                if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    fs::create_dir_all(parent)
                        .map_err(|e| Failure::config(format!("cannot create {}: {e}", parent.display())))?;
                }
                fs::write(&path, text).map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))?;
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| Failure::config(format!("cannot write output: {e}")))?;
            }
        }
        Ok(out.invariants_hold)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_INVARIANT,
        Err(f) => {
            let _ = writeln!(std::io::stderr(), "sharpgrad: {}", f.message);
            f.code
        }
    }
}
