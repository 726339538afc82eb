//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or invalid input, 3 I/O failure,
//! 4 no saddle point in the requested regime, 5 validation or numerical
//! failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::capacity::{alpha_q_limit_check, boundary_distance_alpha_c, capacity_curve};
use crate::error::Error;
use crate::gardner_mc::{capacity_scan, Estimator};
use crate::quantum_sim::verify_circuit;
use crate::replica::{alpha_of_q, free_energy_g, saddle_roots, SeriesConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NO_SOLUTION: i32 = 4;
pub const EXIT_VALIDATION: i32 = 5;

/// Entrywise gap allowed between the simulated and closed-form circuit outputs.
pub const CIRCUIT_GAP_GATE: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "sinecap", version, about = "Storage capacity of perceptrons with a sinusoidal activation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Capacity curve alpha_c(lambda) on a uniform grid.
    Capacity(CapacityArgs),
    /// Replica-symmetric saddle points q* for each (lambda, alpha).
    Saddle(SaddleArgs),
    /// Compare the q -> 1 limit of alpha(lambda, q) with the closed-form capacity.
    Limitcheck(LimitArgs),
    /// Monte Carlo estimate of the fraction of solvable pattern sets.
    Mc(McArgs),
    /// Check the dense circuit simulation against the closed-form output state.
    VerifyCircuit(CircuitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Output {
    /// Output file; standard output when omitted.
    #[arg(short = 'o', long = "output")]
    path: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct CapacityArgs {
    #[arg(long)]
    lmin: f64,
    #[arg(long)]
    lmax: f64,
    #[arg(long)]
    points: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct SaddleArgs {
    /// Comma-separated lambda values.
    #[arg(long, value_delimiter = ',', required = true)]
    lambda: Vec<f64>,
    /// Comma-separated alpha values.
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct LimitArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,5")]
    lambdas: Vec<f64>,
    #[arg(long = "q", value_delimiter = ',', default_value = "0.99,0.999,0.9999")]
    q_list: Vec<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EstimatorArg {
    HitOrMiss,
    Sequential,
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    lambda: f64,
    /// `start:stop:step` or a comma-separated list.
    #[arg(long, value_parser = grid_parser)]
    alphas: Grid,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Weight samples per trial, or walkers for the sequential estimator.
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = EstimatorArg::HitOrMiss)]
    estimator: EstimatorArg,
    /// Metropolis sweeps per level of the sequential estimator.
    #[arg(long, default_value_t = 3)]
    sweeps: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct CircuitArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 200)]
    cases: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Clone, PartialEq)]
struct Grid(Vec<f64>);

/// Parses `start:stop:step` (inclusive of `stop`) or `a,b,c`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || !(stop >= start) {
                return Err("range needs step > 0 and stop >= start".into());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|i| start + i as f64 * step).collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("expected start:stop:step or a comma list, got {s:?}")),
    };
    if grid.is_empty() {
        return Err("empty grid".into());
    }
    Ok(grid)
}

fn grid_parser(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid)
}

/// A flat output record with a fixed CSV column order.
pub trait Record: Serialize + DeserializeOwned {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRecord {
    pub lambda: f64,
    pub alpha_c: f64,
    pub dalpha_dlambda: f64,
    pub k_used: usize,
}

impl Record for CapacityRecord {
    const HEADER: &'static [&'static str] = &["lambda", "alpha_c", "dalpha_dlambda", "k_used"];
    fn cells(&self) -> Vec<String> {
        vec![num(self.lambda), num(self.alpha_c), num(self.dalpha_dlambda), self.k_used.to_string()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleRecord {
    pub lambda: f64,
    pub alpha: f64,
    pub root: usize,
    pub q_star: f64,
    pub g: f64,
    pub residual: f64,
}

impl Record for SaddleRecord {
    const HEADER: &'static [&'static str] = &["lambda", "alpha", "root", "q_star", "g", "residual"];
    fn cells(&self) -> Vec<String> {
        vec![
            num(self.lambda),
            num(self.alpha),
            self.root.to_string(),
            num(self.q_star),
            num(self.g),
            num(self.residual),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRecord {
    pub lambda: f64,
    pub extrapolated: f64,
    pub closed_form: f64,
    pub rel_gap: f64,
    pub gate: f64,
    pub pass: bool,
    pub boundary_distance: f64,
    pub boundary_rel_gap: f64,
}

impl Record for LimitRecord {
    const HEADER: &'static [&'static str] = &[
        "lambda",
        "extrapolated",
        "closed_form",
        "rel_gap",
        "gate",
        "pass",
        "boundary_distance",
        "boundary_rel_gap",
    ];
    fn cells(&self) -> Vec<String> {
        vec![
            num(self.lambda),
            num(self.extrapolated),
            num(self.closed_form),
            num(self.rel_gap),
            num(self.gate),
            self.pass.to_string(),
            num(self.boundary_distance),
            num(self.boundary_rel_gap),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRecord {
    pub alpha: f64,
    pub p: usize,
    pub fraction_positive: f64,
    pub mean_log_fraction: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
}

impl Record for McRecord {
    const HEADER: &'static [&'static str] =
        &["alpha", "p", "fraction_positive", "mean_log_fraction", "q25", "q50", "q75"];
    fn cells(&self) -> Vec<String> {
        vec![
            num(self.alpha),
            self.p.to_string(),
            num(self.fraction_positive),
            num(self.mean_log_fraction),
            num(self.q25),
            num(self.q50),
            num(self.q75),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitRecord {
    pub n: usize,
    pub cases: usize,
    pub max_entry_gap: f64,
    pub max_sigma_x_gap: f64,
    pub pass: bool,
}

impl Record for CircuitRecord {
    const HEADER: &'static [&'static str] = &["n", "cases", "max_entry_gap", "max_sigma_x_gap", "pass"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.cases.to_string(),
            num(self.max_entry_gap),
            num(self.max_sigma_x_gap),
            self.pass.to_string(),
        ]
    }
}

/// CSV text with an optional `# seed=` line before the header.
pub fn emit_csv<R: Record>(rows: &[R], seed: Option<u64>) -> String {
    let mut out = String::new();
    if let Some(seed) = seed {
        out.push_str(&format!("# seed={seed}\n"));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(R::HEADER).expect("in-memory write");
    for r in rows {
        w.write_record(r.cells()).expect("in-memory write");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output"));
    out
}

/// Parses text written by [`emit_csv`], skipping `#` lines.
pub fn parse_csv<R: Record>(text: &str) -> Result<Vec<R>, csv::Error> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect()
}

/// JSON array of records; a seed, if any, is added to every record.
pub fn emit_json<R: Record>(rows: &[R], seed: Option<u64>) -> String {
    let values: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(r).expect("plain record");
            if let (Some(seed), Some(obj)) = (seed, v.as_object_mut()) {
                obj.insert("seed".into(), seed.into());
            }
            v
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&values).expect("plain records");
    s.push('\n');
    s
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) | Error::InvalidPoint(_) | Error::DimensionCap { .. } => EXIT_USAGE,
            Error::NoBracket { .. } => EXIT_NO_SOLUTION,
            _ => EXIT_VALIDATION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn write_output<R: Record>(out: &Output, rows: &[R], seed: Option<u64>) -> Result<(), Failure> {
    let text = match out.format {
        Format::Csv => emit_csv(rows, seed),
        Format::Json => emit_json(rows, seed),
    };
    let io = |e: std::io::Error| Failure {
        code: EXIT_IO,
        message: format!("write failed: {e}"),
    };
    match &out.path {
        Some(path) => fs::write(path, text).map_err(io),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(io),
    }
}

fn cmd_capacity(a: &CapacityArgs) -> Result<i32, Failure> {
    if a.points == 0 {
        return Err(usage("--points must be >= 1"));
    }
    if !(a.lmin >= 0.0) || !(a.lmax >= a.lmin) || !a.lmax.is_finite() {
        return Err(usage("need 0 <= lmin <= lmax"));
    }
    if a.points > 1 && a.lmax == a.lmin {
        return Err(usage("lmin = lmax allows only one point"));
    }
    if !(a.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let grid: Vec<f64> = if a.points == 1 {
        vec![a.lmin]
    } else {
        let h = (a.lmax - a.lmin) / (a.points - 1) as f64;
        (0..a.points)
            .map(|i| if i + 1 == a.points { a.lmax } else { a.lmin + i as f64 * h })
            .collect()
    };
    let curve = capacity_curve(&grid, a.tol)?;
    let rows: Vec<CapacityRecord> = (0..grid.len())
        .map(|i| CapacityRecord {
            lambda: curve.lambdas[i],
            alpha_c: curve.alpha_c[i],
            dalpha_dlambda: curve.dalpha_dlambda[i],
            k_used: curve.truncation_k[i],
        })
        .collect();
    write_output(&a.out, &rows, None)?;
    Ok(EXIT_OK)
}

fn cmd_saddle(a: &SaddleArgs) -> Result<i32, Failure> {
    if a.lambda.iter().chain(&a.alpha).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(usage("lambda and alpha must be positive"));
    }
    let cfg = SeriesConfig::default();
    let mut rows = Vec::new();
    let mut code = EXIT_OK;
    for &lambda in &a.lambda {
        for &alpha in &a.alpha {
            match saddle_roots(lambda, alpha, &cfg) {
                Ok(roots) => {
                    for (root, &q) in roots.iter().enumerate() {
                        rows.push(SaddleRecord {
                            lambda,
                            alpha,
                            root,
                            q_star: q,
                            g: free_energy_g(lambda, alpha, q, &cfg)?,
                            residual: alpha_of_q(lambda, q, &cfg)? - alpha,
                        });
                    }
                }
                Err(e @ Error::NoBracket { .. }) => {
                    eprintln!("sinecap: {e}");
                    code = EXIT_NO_SOLUTION;
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    write_output(&a.out, &rows, None)?;
    Ok(code)
}

/// Allowed relative gap of the `q → 1` check at `λ`.
pub fn limit_gate(lambda: f64) -> f64 {
    if lambda < 5.0 {
        0.02
    } else {
        0.05
    }
}

fn cmd_limitcheck(a: &LimitArgs) -> Result<i32, Failure> {
    if a.lambdas.is_empty() || a.lambdas.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(usage("--lambdas must be positive"));
    }
    let cfg = SeriesConfig::default();
    let mut rows = Vec::new();
    for &lambda in &a.lambdas {
        let c = alpha_q_limit_check(lambda, &a.q_list, &cfg)?;
        let boundary = boundary_distance_alpha_c(lambda, 1e-14)?;
        let gate = limit_gate(lambda);
        rows.push(LimitRecord {
            lambda,
            extrapolated: c.extrapolated,
            closed_form: c.closed_form,
            rel_gap: c.rel_gap,
            gate,
            pass: c.rel_gap <= gate,
            boundary_distance: boundary,
            boundary_rel_gap: (c.extrapolated - boundary).abs() / boundary,
        });
    }
    write_output(&a.out, &rows, None)?;
    Ok(if rows.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_VALIDATION })
}

fn cmd_mc(a: &McArgs) -> Result<i32, Failure> {
    let estimator = match a.estimator {
        EstimatorArg::HitOrMiss => Estimator::HitOrMiss,
        EstimatorArg::Sequential => Estimator::Sequential { sweeps: a.sweeps },
    };
    let rows: Vec<McRecord> = capacity_scan(a.n, a.lambda, &a.alphas.0, a.trials, a.samples, a.seed, estimator)?
        .into_iter()
        .map(|r| McRecord {
            alpha: r.alpha,
            p: r.p,
            fraction_positive: r.fraction_positive,
            mean_log_fraction: r.mean_log_fraction,
            q25: r.q25,
            q50: r.q50,
            q75: r.q75,
        })
        .collect();
    write_output(&a.out, &rows, Some(a.seed))?;
    Ok(EXIT_OK)
}

fn cmd_verify_circuit(a: &CircuitArgs) -> Result<i32, Failure> {
    let r = verify_circuit(a.n, a.cases, a.seed)?;
    let pass = r.max_entry_gap <= CIRCUIT_GAP_GATE && r.max_sigma_x_gap <= CIRCUIT_GAP_GATE;
    let row = CircuitRecord {
        n: r.n,
        cases: r.cases,
        max_entry_gap: r.max_entry_gap,
        max_sigma_x_gap: r.max_sigma_x_gap,
        pass,
    };
    write_output(&a.out, &[row], Some(a.seed))?;
    Ok(if pass { EXIT_OK } else { EXIT_VALIDATION })
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match &cli.command {
        Command::Capacity(a) => cmd_capacity(a),
        Command::Saddle(a) => cmd_saddle(a),
        Command::Limitcheck(a) => cmd_limitcheck(a),
        Command::Mc(a) => cmd_mc(a),
        Command::VerifyCircuit(a) => cmd_verify_circuit(a),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("sinecap: {}", f.message);
            f.code
        }
    }
}
