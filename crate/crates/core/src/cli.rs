//! The `hpd` command-line front-end.
//!
//! Every run writes one JSON document `{command, provenance, result, passed}`
//! (or a CSV rendering of `result`). Exit codes: 0 when the computation
//! completed and its checks passed, 1 when a mathematical check failed, 2 on
//! invalid input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::circle::{ac_szego_mean, poisson_log_bound, Density, MeasureJson, SpectralMeasure, TrigPoly, DEFAULT_GRID};
use crate::criterion::{self, CRITERION_TOL};
use crate::error::Error;
use crate::hankel::{self, DEFAULT_HANKEL_GRID, DEFAULT_N_SYM};
use crate::kernel::{
    branching_toeplitz, cantor_gram, hpd_check, markov_product, psd_check, HermitianMatrix, HpdSequence,
    HpdSequenceJson, MatrixJson, PSD_TOL,
};
use crate::predict::{self, PredictOptions, DEFAULT_DEPTHS};
use crate::process::{self, CovCheck, SimulationConfig, XrMethod};
use crate::tree::{relation, tq1_truncation, TreeSpec, TreeTruncation, Vertex};

/// Environment variable read when `--threads` is absent.
pub const THREADS_ENV: &str = "HPD_THREADS";

#[derive(Debug, Parser, Serialize)]
#[command(name = "hpd", version, about = "Hyper-positive definite kernels on rooted trees")]
pub struct Cli {
    /// Grid size for quadratures and sup-norms.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Tolerance override for PSD, criterion and prediction checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (falls back to HPD_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Tree truncations, descendant counts and vertex relations.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Branching-Toeplitz kernels and PSD checks.
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Finite-order q-HPD test.
    #[command(subcommand)]
    Hpd(HpdCmd),
    /// Gaussian simulation.
    #[command(subcommand)]
    Simulate(SimulateCmd),
    /// Prediction distances.
    #[command(subcommand)]
    Predict(PredictCmd),
    /// T(q;1) admissibility criteria.
    #[command(subcommand)]
    Criterion(CriterionCmd),
    /// Hankel inequalities and boundedness.
    #[command(subcommand)]
    Hankel(HankelCmd),
    /// Geometric mean of the absolutely continuous part of a measure.
    Szego(SzegoArgs),
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeCmd {
    /// Breadth-first vertex list of the depth-D truncation of T_q.
    Truncate {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        depth: usize,
    },
    /// Δ_n for n = 1..=n_max.
    Delta {
        /// Tree JSON, a path to it, or `homogeneous:q:depth` / `tq1:q:n`.
        #[arg(long)]
        tree: String,
        #[arg(long)]
        n_max: usize,
    },
    /// Vertex order of T(q;1) cut at branch length n.
    Tq1 {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        n: usize,
    },
    /// Comparability and distance of two words.
    Relation {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelCmd {
    /// Branching-Toeplitz kernel of α on the depth-D truncation.
    Build {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        depth: usize,
    },
    /// Cylinder-indicator Gram factorization of the β_q kernel.
    Cantor {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        depth: usize,
    },
    /// Gluing of two unit-diagonal kernels at a shared label.
    Markov {
        #[arg(long)]
        k1: String,
        #[arg(long)]
        k2: String,
        #[arg(long)]
        x0: String,
    },
    /// PSD check of a matrix file.
    Psd {
        #[arg(long)]
        matrix: String,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HpdCmd {
    Check {
        #[command(flatten)]
        alpha: AlphaArgs,
        /// Toeplitz order: α(0..=N) is tested.
        #[arg(long = "N")]
        order: usize,
        /// Cross-check with the tree kernel at this depth.
        #[arg(long)]
        oracle_depth: Option<usize>,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct AlphaArgs {
    /// `beta`, `white`, `xr:r`, inline JSON `{"q":..,"alpha":[..]}` or a path.
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub q: Option<usize>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulateCmd {
    /// The process X^(r) on the depth-D truncation of T_q.
    Xr {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        /// Series cutoff below the deepest level (default: tail variance below 1e-6).
        #[arg(long)]
        tail: Option<usize>,
        #[arg(long, value_enum, default_value_t = MethodArg::Recursive)]
        method: MethodArg,
        /// Emit covariance checks for (e,e), (e,s1) and (s1,s2) instead of the samples.
        #[arg(long)]
        check: bool,
    },
    /// Samples with covariance equal to the tree kernel of α.
    Kernel {
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        /// Emit the level averages Θ_0..Θ_D instead of the vertex values.
        #[arg(long)]
        theta: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Recursive,
    Explicit,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictCmd {
    /// Root prediction distance on T_q from α or from its spectral measure.
    Tq {
        /// Optional explicit α; its spectral coefficients must match `--measure`.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        measure: Option<String>,
        #[arg(long)]
        q: usize,
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<usize>>,
        #[arg(long)]
        reduction_only: bool,
    },
    /// Closed-form root prediction distance on T(q;1).
    Tq1 {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        q: usize,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionCmd {
    /// exp(∫log w dm) ≥ (1 − 1/q)·μ(𝕋), with an optional C_n sweep.
    Tq1 {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        oracle: Option<usize>,
    },
    /// Two-level density a on half the circle and b on the other half.
    TwoLevel {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        q: usize,
    },
    /// |ν̂(n)|² ≤ 1/Δ_n along a tree.
    FourierBound {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        tree: String,
        #[arg(long)]
        n_max: usize,
    },
    /// sup|g| ≤ ½ log(q/(q−1)) for the density e^g.
    SupNorm {
        #[arg(long)]
        g: String,
        #[arg(long)]
        q: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    TwoWeight,
    En,
    Smoothed,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HankelCmd {
    /// Grid verification of one weighted sup-norm inequality.
    Verify {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long)]
        measure: String,
        /// Poisson radius (two-weight only; the other two fix their radii).
        #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
        r: f64,
        #[arg(long)]
        f: String,
        #[arg(long = "N", default_value_t = 1)]
        n: usize,
        #[arg(long = "B0")]
        b0: Option<String>,
        #[arg(long, default_value_t = DEFAULT_N_SYM)]
        n_sym: usize,
    },
    /// Tri-state boundedness of H_φ: H² → L^∞.
    Bounded {
        /// Trig-poly JSON, or a family `geometric:ρ`, `harmonic`, `power:p`.
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value_t = 16)]
        log2_max: u32,
    },
    /// sup_θ (Σ_n |Σ_{m≤−n} φ̂(m)e^{imθ}|²)^{1/2}.
    Norm {
        /// As for `bounded`; families are cut to φ̂(−1..=−n_trunc).
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value_t = 1024)]
        n_trunc: usize,
    },
    /// Σ a_m b_n / max(m,n) against 4‖a‖‖b‖.
    Hlp {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct SzegoArgs {
    #[arg(long)]
    pub measure: String,
    /// Also check ∫log(P_r ∗ μ) dm ≥ log(1 − r²) for the normalized measure.
    #[arg(long)]
    pub r: Option<f64>,
}

/// Failure of a run, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::NotPsd { .. }) { 1 } else { 2 };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Result of one subcommand before rendering.
pub struct Outcome {
    pub result: Value,
    pub passed: bool,
    /// Dedicated CSV rendering; the generic key/value flattening is used otherwise.
    pub csv: Option<String>,
}

impl Outcome {
    fn new(result: impl Serialize, passed: bool) -> CliResult<Self> {
        Ok(Outcome {
            result: serde_json::to_value(result).map_err(|e| CliError::input(e.to_string()))?,
            passed,
            csv: None,
        })
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

#[derive(Serialize)]
struct Provenance<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a Cli,
}

#[derive(Serialize)]
struct Document<'a> {
    command: String,
    provenance: Provenance<'a>,
    result: &'a Value,
    passed: bool,
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

/// Runs a parsed command and writes its output; returns 0 or 1.
pub fn execute(cli: &Cli) -> CliResult<i32> {
    let (text, passed) = render(cli)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(if passed { 0 } else { 1 })
}

/// Runs a parsed command; returns the rendered output and whether its checks passed.
pub fn render(cli: &Cli) -> CliResult<(String, bool)> {
    let threads = match cli.threads {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| CliError::input(format!("{THREADS_ENV}={v} is not a thread count")))?,
            ),
            Err(_) => None,
        },
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::input(e.to_string()))?;
    let outcome = pool.install(|| dispatch(cli))?;
    let text = match cli.format {
        Format::Json => {
            let doc = Document {
                command: command_name(&cli.command),
                provenance: Provenance {
                    tool: "hpd",
                    version: env!("CARGO_PKG_VERSION"),
                    config: cli,
                },
                result: &outcome.result,
                passed: outcome.passed,
            };
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::input(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => outcome.csv.unwrap_or_else(|| flatten_csv(&outcome.result)),
    };
    Ok((text, outcome.passed))
}

fn command_name(cmd: &Command) -> String {
    let v = serde_json::to_value(cmd).unwrap_or(Value::Null);
    let mut parts = Vec::new();
    let mut cur = &v;
    loop {
        match cur {
            Value::Object(m) if m.len() == 1 => {
                let (k, inner) = m.iter().next().expect("one entry");
                parts.push(k.clone());
                cur = inner;
            }
            Value::String(s) => {
                parts.push(s.clone());
                break;
            }
            _ => break,
        }
    }
    parts.join(" ")
}

/// `key,value` lines for every scalar leaf of `v`.
pub fn flatten_csv(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let p = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&p, x, out);
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
            }
            Value::String(s) => {
                let _ = writeln!(out, "{prefix},{s}");
            }
            other => {
                let _ = writeln!(out, "{prefix},{other}");
            }
        }
    }
    let mut out = String::from("key,value\n");
    walk("", v, &mut out);
    out
}

fn grid(cli: &Cli, default: usize) -> CliResult<usize> {
    match cli.grid {
        Some(0) => Err(CliError::input("--grid must be positive")),
        Some(g) => Ok(g),
        None => Ok(default),
    }
}

fn dispatch(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Tree(cmd) => tree_cmd(cmd),
        Command::Kernel(cmd) => kernel_cmd(cli, cmd),
        Command::Hpd(HpdCmd::Check {
            alpha,
            order,
            oracle_depth,
        }) => {
            let seq = alpha_parse(&alpha.alpha, alpha.q, *order)?;
            let report = hpd_check(&seq, *order, *oracle_depth)?;
            let passed = report.verdict && !report.oracle_disagrees;
            Outcome::new(report, passed)
        }
        Command::Simulate(cmd) => simulate_cmd(cli, cmd),
        Command::Predict(cmd) => predict_cmd(cli, cmd),
        Command::Criterion(cmd) => criterion_cmd(cli, cmd),
        Command::Hankel(cmd) => hankel_cmd(cli, cmd),
        Command::Szego(args) => {
            let mu = measure_parse(&args.measure)?;
            let g = grid(cli, DEFAULT_GRID)?;
            let mean = ac_szego_mean(&mu, g);
            let bound = args
                .r
                .map(|r| poisson_log_bound(&mu, r, g, cli.tol.unwrap_or(CRITERION_TOL)))
                .transpose()?;
            let passed = bound.is_none_or(|b| b.holds);
            Outcome::new(json!({ "szego": mean, "poisson_log_bound": bound }), passed)
        }
    }
}

fn tree_cmd(cmd: &TreeCmd) -> CliResult<Outcome> {
    match cmd {
        TreeCmd::Truncate { q, depth } => {
            let t = TreeTruncation::new(*q, *depth)?;
            let rows: Vec<Value> = t
                .vertices()
                .iter()
                .enumerate()
                .map(|(i, v)| json!({ "index": i, "label": v.to_string(), "level": v.len() }))
                .collect();
            let mut csv = String::from("index,label,level\n");
            for (i, v) in t.vertices().iter().enumerate() {
                let _ = writeln!(csv, "{i},{v},{}", v.len());
            }
            Ok(Outcome::new(
                json!({ "q": q, "depth": depth, "count": t.len(), "vertices": rows }),
                true,
            )?
            .with_csv(csv))
        }
        TreeCmd::Delta { tree, n_max } => {
            let t = tree_parse(tree)?.build()?;
            let delta: Vec<String> = t.delta_sequence(*n_max).iter().map(u128::to_string).collect();
            let as_numbers: Vec<Value> = delta
                .iter()
                .map(|d| d.parse::<u64>().map(Value::from).unwrap_or(Value::String(d.clone())))
                .collect();
            Outcome::new(
                json!({ "vertices": t.len(), "n_max": n_max, "delta": as_numbers }),
                true,
            )
        }
        TreeCmd::Tq1 { q, n } => {
            let labels: Vec<String> = tq1_truncation(*q, *n)?.iter().map(Vertex::to_string).collect();
            Outcome::new(json!({ "q": q, "n": n, "count": labels.len(), "labels": labels }), true)
        }
        TreeCmd::Relation { a, b } => {
            let va: Vertex = a.parse()?;
            let vb: Vertex = b.parse()?;
            Outcome::new(
                json!({ "a": va.to_string(), "b": vb.to_string(), "relation": relation(&va, &vb) }),
                true,
            )
        }
    }
}

fn kernel_cmd(cli: &Cli, cmd: &KernelCmd) -> CliResult<Outcome> {
    let tol = cli.tol.unwrap_or(PSD_TOL);
    match cmd {
        KernelCmd::Build { alpha, depth } => {
            let seq = alpha_parse(&alpha.alpha, alpha.q, *depth)?;
            let trunc = TreeTruncation::new(seq.arity(), *depth)?;
            let a = branching_toeplitz(&seq, &trunc)?;
            let psd = psd_check(&a, tol);
            Ok(Outcome::new(json!({ "matrix": MatrixJson::from(&a), "psd": psd }), psd.psd)?.with_csv(a.to_csv()))
        }
        KernelCmd::Cantor { q, depth } => {
            let cg = cantor_gram(*q, *depth)?;
            let direct = branching_toeplitz(&HpdSequence::beta(*q, *depth), &TreeTruncation::new(*q, *depth)?)?;
            let deviation = (cg.gram.data() - direct.data())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            let psd = psd_check(&cg.gram, tol);
            let passed = deviation <= 1e-12 && psd.psd;
            Ok(Outcome::new(
                json!({
                    "q": q,
                    "depth": depth,
                    "vertices": cg.labels.len(),
                    "leaves": cg.vectors.ncols(),
                    "leaf_weight": cg.leaf_weight,
                    "max_deviation": deviation,
                    "psd": psd,
                }),
                passed,
            )?
            .with_csv(cg.gram.to_csv()))
        }
        KernelCmd::Markov { k1, k2, x0 } => {
            let k1 = matrix_parse(k1)?;
            let k2 = matrix_parse(k2)?;
            let k = markov_product(&k1, &k2, x0)?;
            let psd = psd_check(&k, tol);
            Ok(Outcome::new(json!({ "matrix": MatrixJson::from(&k), "psd": psd }), psd.psd)?.with_csv(k.to_csv()))
        }
        KernelCmd::Psd { matrix } => {
            let a = matrix_parse(matrix)?;
            let psd = psd_check(&a, tol);
            Outcome::new(json!({ "size": a.size(), "psd": psd }), psd.psd)
        }
    }
}

fn simulate_cmd(cli: &Cli, cmd: &SimulateCmd) -> CliResult<Outcome> {
    match cmd {
        SimulateCmd::Xr {
            q,
            r,
            depth,
            n,
            tail,
            method,
            check,
        } => {
            let mut cfg = SimulationConfig::new(*q, *r, *depth, *n, cli.seed);
            cfg.tail = *tail;
            cfg.method = match method {
                MethodArg::Recursive => XrMethod::Recursive,
                MethodArg::Explicit => XrMethod::Explicit,
            };
            let batch = process::simulate_xr(&cfg)?;
            if !*check {
                let csv = batch.to_csv();
                return Ok(Outcome::new(&batch, true)?.with_csv(csv));
            }
            if *depth == 0 {
                return Err(CliError::input("--check needs depth ≥ 1"));
            }
            let idx = |l: &str| {
                batch
                    .index_of(l)
                    .ok_or_else(|| CliError::from(Error::MissingLabel(l.into())))
            };
            let pairs = [
                (idx("e")?, idx("e")?),
                (idx("e")?, idx("s1")?),
                (idx("s1")?, idx("s2")?),
            ];
            let estimates = process::empirical_cov(&batch, &pairs)?;
            let checks: Vec<CovCheck> = estimates
                .iter()
                .map(|est| {
                    let a: Vertex = batch.labels[est.i].parse().expect("labels come from vertices");
                    let b: Vertex = batch.labels[est.j].parse().expect("labels come from vertices");
                    CovCheck::new(&batch, est, process::xr_covariance(&cfg, &a, &b))
                })
                .collect();
            let passed = checks.iter().all(|c| c.pass);
            Outcome::new(json!({ "provenance": batch.provenance, "checks": checks }), passed)
        }
        SimulateCmd::Kernel { alpha, depth, n, theta } => {
            let seq = alpha_parse(&alpha.alpha, alpha.q, *depth)?;
            let trunc = TreeTruncation::new(seq.arity(), *depth)?;
            let a = branching_toeplitz(&seq, &trunc)?;
            let mut batch = process::sample_from_kernel(&a, *n, cli.seed)?;
            if *theta {
                batch = process::theta_average(&batch, &trunc)?;
            }
            let csv = batch.to_csv();
            Ok(Outcome::new(&batch, true)?.with_csv(csv))
        }
    }
}

fn predict_cmd(cli: &Cli, cmd: &PredictCmd) -> CliResult<Outcome> {
    let g = grid(cli, DEFAULT_GRID)?;
    match cmd {
        PredictCmd::Tq {
            alpha,
            measure,
            q,
            depths,
            reduction_only,
        } => {
            let depths = depths.clone().unwrap_or_else(|| DEFAULT_DEPTHS.to_vec());
            let opts = PredictOptions {
                grid: g,
                tol: cli.tol.unwrap_or(PredictOptions::default().tol),
                reduction_only: *reduction_only,
            };
            let max_depth = depths.iter().copied().max().unwrap_or(0);
            let report = match (alpha, measure) {
                (None, Some(m)) => predict::predict_tq_from_measure(&measure_parse(m)?, *q, &depths, &opts)?,
                (Some(a), Some(m)) => predict::predict_tq(
                    &alpha_parse(a, Some(*q), max_depth)?,
                    Some(&measure_parse(m)?),
                    &depths,
                    &opts,
                )?,
                (_, None) => return Err(CliError::input("predict tq needs --measure")),
            };
            let mut csv = String::from("depth,value,method\n");
            for v in &report.oracle_values {
                let method = serde_json::to_value(v.method)
                    .ok()
                    .and_then(|m| m.as_str().map(str::to_owned))
                    .unwrap_or_default();
                let _ = writeln!(csv, "{},{},{}", v.depth, v.value, method);
            }
            let _ = writeln!(csv, "inf,{},szego", report.szego_value);
            Ok(Outcome::new(&report, true)?.with_csv(csv))
        }
        PredictCmd::Tq1 { measure, q } => {
            let p = predict::predict_tq1(&measure_parse(measure)?, *q, g, cli.tol.unwrap_or(CRITERION_TOL))?;
            Outcome::new(p, p.valid)
        }
    }
}

fn criterion_cmd(cli: &Cli, cmd: &CriterionCmd) -> CliResult<Outcome> {
    let g = grid(cli, DEFAULT_GRID)?;
    let tol = cli.tol.unwrap_or(CRITERION_TOL);
    match cmd {
        CriterionCmd::Tq1 { measure, q, oracle } => {
            let mu = measure_parse(measure)?;
            let report = criterion::tq1_criterion(&mu, *q, g, tol)?;
            let oracle = oracle.map(|n| criterion::cn_oracle(&mu, *q, n)).transpose()?;
            Outcome::new(json!({ "criterion": report, "oracle": oracle }), report.holds)
        }
        CriterionCmd::TwoLevel { a, b, q } => {
            let bounds = criterion::two_level_bounds(*q)?;
            let check = criterion::two_level_check(*a, *b, *q, tol)?;
            Outcome::new(json!({ "bounds": bounds, "check": check }), check.holds)
        }
        CriterionCmd::FourierBound { measure, tree, n_max } => {
            let mu = measure_parse(measure)?;
            let t = tree_parse(tree)?.build()?;
            let report = criterion::fourier_bound_check(&mu, &t, *n_max, tol)?;
            let passed = report.violations.is_empty();
            Outcome::new(report, passed)
        }
        CriterionCmd::SupNorm { g: gfile, q } => {
            let p: TrigPoly = load_json(gfile)?;
            let report = criterion::sup_norm_sufficient(&p, *q, g, tol)?;
            Outcome::new(report, report.criterion.holds)
        }
    }
}

fn hankel_cmd(cli: &Cli, cmd: &HankelCmd) -> CliResult<Outcome> {
    match cmd {
        HankelCmd::Verify {
            which,
            measure,
            r,
            f,
            n,
            b0,
            n_sym,
        } => {
            let g = grid(cli, DEFAULT_HANKEL_GRID)?;
            let mu = measure_parse(measure)?;
            let f: TrigPoly = load_json(f)?;
            let report = match which {
                Which::TwoWeight => hankel::two_weight_check(&mu, *r, &f, g, *n_sym)?,
                Which::En => {
                    let b0 = match b0 {
                        Some(s) => load_json(s)?,
                        None => TrigPoly::constant(1.0),
                    };
                    hankel::en_inequality_check(&mu, &b0, &f, *n, g, *n_sym)?
                }
                Which::Smoothed => hankel::smoothed_inequality_check(&mu, &f, g, *n_sym)?,
            };
            Outcome::new(report, report.holds)
        }
        HankelCmd::Bounded { symbol, log2_max } => {
            let report = match family_parse(symbol)? {
                Some(family) => hankel::boundedness_family(|m| family.coeff(m), *log2_max)?,
                None => hankel::boundedness_conditions(&load_json(symbol)?),
            };
            Outcome::new(report, true)
        }
        HankelCmd::Norm { symbol, n_trunc } => {
            let g = grid(cli, DEFAULT_HANKEL_GRID)?;
            let phi = match family_parse(symbol)? {
                Some(family) => TrigPoly::from_coeffs((1..=*n_trunc).map(|m| (-(m as i64), family.coeff(m)))),
                None => load_json(symbol)?,
            };
            Outcome::new(
                json!({ "norm": hankel::h2_linf_norm(&phi, *n_trunc, g), "n_trunc": n_trunc, "grid": g }),
                true,
            )
        }
        HankelCmd::Hlp { a, b } => {
            let a: Vec<f64> = load_json(a)?;
            let b: Vec<f64> = load_json(b)?;
            let p = hankel::hlp_pairing(&a, &b)?;
            Outcome::new(p, p.holds)
        }
    }
}

/// Coefficient families `φ̂(−m)`, `m ≥ 1`, for `hankel bounded`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SymbolFamily {
    Geometric { ratio: f64 },
    Harmonic,
    Power { exponent: f64 },
}

impl SymbolFamily {
    pub fn coeff(&self, m: usize) -> Complex64 {
        if m == 0 {
            return Complex64::default();
        }
        let m = m as f64;
        Complex64::new(
            match *self {
                SymbolFamily::Geometric { ratio } => ratio.powf(m),
                SymbolFamily::Harmonic => 1.0 / m,
                SymbolFamily::Power { exponent } => m.powf(-exponent),
            },
            0.0,
        )
    }
}

fn family_parse(spec: &str) -> CliResult<Option<SymbolFamily>> {
    let s = spec.trim();
    let num = |v: &str| {
        v.parse::<f64>()
            .map_err(|_| CliError::input(format!("`{v}` is not a number in `{s}`")))
    };
    Ok(match s.split_once(':') {
        _ if s == "harmonic" => Some(SymbolFamily::Harmonic),
        Some(("geometric", v)) => Some(SymbolFamily::Geometric { ratio: num(v)? }),
        Some(("power", v)) => Some(SymbolFamily::Power { exponent: num(v)? }),
        _ if s.starts_with('{') && s.contains("\"family\"") => Some(parse_json_text(s, "<inline>")?),
        _ if !s.starts_with('{') && std::path::Path::new(s).is_file() => {
            let text = read(s)?;
            if text.contains("\"family\"") {
                Some(parse_json_text(&text, s)?)
            } else {
                None
            }
        }
        _ => None,
    })
}

fn read(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{path}: {e}")))
}

fn parse_json_text<T: DeserializeOwned>(text: &str, source: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::input(format!("{source}:{}:{}: {e}", e.line(), e.column())))
}

/// Inline JSON (starting with `{` or `[`) or a path to a JSON file.
pub fn load_json<T: DeserializeOwned>(spec: &str) -> CliResult<T> {
    let s = spec.trim_start();
    if s.starts_with('{') || s.starts_with('[') {
        parse_json_text(s, "<inline>")
    } else {
        parse_json_text(&read(spec)?, spec)
    }
}

/// `lebesgue`, `atom0`, `poisson:r` (the density `P_r`), inline JSON or a path.
pub fn measure_parse(spec: &str) -> CliResult<SpectralMeasure> {
    let s = spec.trim();
    let mu = match s {
        "lebesgue" => SpectralMeasure::lebesgue(),
        "atom0" => SpectralMeasure::atom(0.0, 1.0),
        _ => match s.strip_prefix("poisson:") {
            Some(r) => {
                let r: f64 = r
                    .parse()
                    .map_err(|_| CliError::input(format!("`{r}` is not a Poisson radius")))?;
                if !(0.0..1.0).contains(&r) {
                    return Err(CliError::input(format!("Poisson radius {r} must lie in [0, 1)")));
                }
                SpectralMeasure::new(
                    vec![],
                    Some(Density::Poisson {
                        r,
                        base: Box::new(SpectralMeasure::atom(0.0, 1.0)),
                    }),
                )?
            }
            None => SpectralMeasure::try_from(load_json::<MeasureJson>(s)?)?,
        },
    };
    Ok(mu)
}

/// `beta`, `white`, `xr:r` (all need `q`), inline JSON or a path; `n_max` is the length needed.
pub fn alpha_parse(spec: &str, q: Option<usize>, n_max: usize) -> CliResult<HpdSequence> {
    let s = spec.trim();
    let need_q = || q.ok_or_else(|| CliError::input(format!("--q is required with --alpha {s}")));
    let seq = match s {
        "beta" => HpdSequence::beta(need_q()?, n_max),
        "white" => HpdSequence::white_noise(need_q()?, n_max),
        _ => match s.strip_prefix("xr:") {
            Some(r) => {
                let r: f64 = r
                    .parse()
                    .map_err(|_| CliError::input(format!("`{r}` is not a radius")))?;
                if !(0.0..1.0).contains(&r) {
                    return Err(CliError::input(format!("radius {r} must lie in [0, 1)")));
                }
                process::xr_alpha(need_q()?, r, n_max)
            }
            None => {
                let seq = HpdSequence::try_from(load_json::<HpdSequenceJson>(s)?)?;
                if let Some(q) = q {
                    if q != seq.arity() {
                        return Err(CliError::input(format!(
                            "--q {q} disagrees with q = {} in {s}",
                            seq.arity()
                        )));
                    }
                }
                seq
            }
        },
    };
    Ok(seq)
}

/// Tree JSON, a path to it, or `homogeneous:q:depth` / `tq1:q:n`.
pub fn tree_parse(spec: &str) -> CliResult<TreeSpec> {
    let s = spec.trim();
    let parts: Vec<&str> = s.split(':').collect();
    let int = |v: &str| {
        v.parse::<usize>()
            .map_err(|_| CliError::input(format!("`{v}` is not an integer in `{s}`")))
    };
    match parts.as_slice() {
        ["homogeneous", q, d] => Ok(TreeSpec::Homogeneous {
            q: int(q)?,
            depth: int(d)?,
        }),
        ["tq1", q, n] => Ok(TreeSpec::Tq1 { q: int(q)?, n: int(n)? }),
        _ => load_json(s),
    }
}

fn matrix_parse(spec: &str) -> CliResult<HermitianMatrix> {
    Ok(HermitianMatrix::try_from(load_json::<MatrixJson>(spec)?)?)
}
