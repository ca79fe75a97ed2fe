//! Command-line front end: `validate`, `simulate`, and `estimate`.
//!
//! - `validate` replays the closed forms against the quadrature oracle for
//!   the configured priors and prints a pass/fail table.
//! - `simulate` runs the Monte Carlo comparison (optionally over a
//!   parameter sweep) and writes a CSV plus a JSON manifest that fully
//!   reconstructs the run inputs.
//! - `estimate` reads one observation vector of whitespace-separated reals
//!   and prints the decision and estimates as a single JSON record.
//!
//! Exit codes: 0 success, 1 validation checks failed, 2 bad configuration
//! or input data, 3 I/O errors. Configuration is a single JSON document
//! mirroring the experiment description; flags override individual fields.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::io::{self, Read as _, Write as _};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::fusion::{
    conditional_risks, detect_compact, detect_joint, detect_separate, DecisionReport, FusionError,
    Method,
};
use crate::model::{
    angular_constant, CostParams, HypothesisPriors, JointPriorParams, NoisePriorParams,
    SufficientStatistic,
};
use crate::moments::{log_moment_h0, log_moment_h1, MomentError};
use crate::montecarlo::{
    expand_sweep, point_seed, run_experiment, ExperimentConfig, MethodMetrics, MonteCarloError,
    SweepPoint, SweepSpec,
};
use crate::oracle::{
    joint_prior_mass, noise_prior_mass, quad_angular_constant, quad_log_moment_h0,
    quad_log_moment_h1, quad_risk_h0, quad_risk_h1, OracleError, QuadratureSettings,
};

/// Errors carrying their process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Validation checks ran and failed (exit 1).
    Failed(String),
    /// Bad configuration or input data (exit 2).
    Input(String),
    /// Filesystem or stream problem (exit 3).
    Io { path: String, source: io::Error },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Failed(msg) | CliError::Input(msg) => f.write_str(msg),
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

fn input_err(err: impl fmt::Display) -> CliError {
    CliError::Input(err.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "snrfuse",
    version,
    about = "Jointly optimal Bayesian detection and signal/noise power estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the closed-form moments, risks, and prior normalization
    /// against the quadrature oracle
    Validate(ValidateArgs),
    /// Run the Monte Carlo method comparison and write CSV plus manifest
    Simulate(SimulateArgs),
    /// Detect and estimate on a single observation vector
    Estimate(EstimateArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// JSON experiment config (defaults to the built-in reference config)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Relative tolerance for closed-form vs. oracle comparisons
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON experiment config (defaults to the built-in reference config)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV path; the manifest lands next to it as
    /// `<stem>.manifest.json`
    #[arg(long)]
    pub out: PathBuf,
    /// Base seed, overriding the config's `seed`
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = library default)
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Sweep spec `param=v1,v2,...`; repeat for a cartesian grid
    #[arg(long)]
    pub sweep: Vec<String>,
    /// Methods to run (joint, compact, separate), overriding the config
    #[arg(long, value_delimiter = ',')]
    pub method: Vec<String>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Observation file of whitespace-separated reals; `-` reads stdin
    #[arg(default_value = "-")]
    pub data: PathBuf,
    /// JSON experiment config (defaults to the built-in reference config)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Method to run (joint, compact, separate)
    #[arg(long, default_value = "joint")]
    pub method: String,
    /// Write the JSON record here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate(args) => run_validate(&args),
        Command::Simulate(args) => run_simulate(&args),
        Command::Estimate(args) => run_estimate(&args),
    }
}

// ---------------------------------------------------------------------------
// configuration file

/// On-disk experiment description. Every field has a reference default, so
/// a partial (or absent) config file works.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub trials: usize,
    pub vector_len: usize,
    pub hyp_priors: HypPriorsFile,
    pub noise_prior: NoisePriorFile,
    pub joint_prior: JointPriorFile,
    pub costs: CostsFile,
    pub seed: u64,
    pub methods: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypPriorsFile {
    pub pi0: f64,
    pub pi1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoisePriorFile {
    pub alpha0: f64,
    pub beta0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointPriorFile {
    pub alpha1: f64,
    pub beta1: f64,
    pub phi1: f64,
    pub phi2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostsFile {
    pub a00: f64,
    pub a01: f64,
    pub a10: f64,
    pub a11: f64,
    pub b00: f64,
    pub b01: f64,
    pub b10: f64,
    pub b11: f64,
}

impl Default for ConfigFile {
    /// The reference configuration: 20,000 trials of 128 samples, equal
    /// hypothesis priors, `α₀ = α₁ = 3`, `β₀ = 1`, `β₁ = 9.1`,
    /// `φ = [0, π/8]`, unit costs.
    fn default() -> Self {
        Self {
            trials: 20_000,
            vector_len: 128,
            hyp_priors: HypPriorsFile { pi0: 0.5, pi1: 0.5 },
            noise_prior: NoisePriorFile {
                alpha0: 3.0,
                beta0: 1.0,
            },
            joint_prior: JointPriorFile {
                alpha1: 3.0,
                beta1: 9.1,
                phi1: 0.0,
                phi2: PI / 8.0,
            },
            costs: CostsFile {
                a00: 0.0,
                a01: 1.0,
                a10: 1.0,
                a11: 0.0,
                b00: 1.0,
                b01: 1.0,
                b10: 1.0,
                b11: 1.0,
            },
            seed: 0,
            methods: vec!["joint".into(), "compact".into(), "separate".into()],
        }
    }
}

/// A config file checked against every domain invariant.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub experiment: ExperimentConfig,
    pub seed: u64,
    pub methods: Vec<Method>,
}

impl ConfigFile {
    pub fn resolve(&self) -> Result<ResolvedConfig, CliError> {
        let priors =
            HypothesisPriors::new(self.hyp_priors.pi0, self.hyp_priors.pi1).map_err(input_err)?;
        let noise = NoisePriorParams::new(self.noise_prior.alpha0, self.noise_prior.beta0)
            .map_err(input_err)?;
        let joint = JointPriorParams::new(
            self.joint_prior.alpha1,
            self.joint_prior.beta1,
            self.joint_prior.phi1,
            self.joint_prior.phi2,
        )
        .map_err(input_err)?;
        let costs = CostParams::new(
            self.costs.a00,
            self.costs.a01,
            self.costs.a10,
            self.costs.a11,
            self.costs.b00,
            self.costs.b01,
            self.costs.b10,
            self.costs.b11,
        )
        .map_err(input_err)?;
        let experiment =
            ExperimentConfig::new(self.trials, self.vector_len, priors, costs, noise, joint)
                .map_err(input_err)?;
        let methods = parse_methods(&self.methods)?;
        Ok(ResolvedConfig {
            experiment,
            seed: self.seed,
            methods,
        })
    }
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>, CliError> {
    if names.is_empty() {
        return Err(CliError::Input("at least one method is required".into()));
    }
    let mut methods = Vec::with_capacity(names.len());
    for name in names {
        let method: Method = name.parse().map_err(CliError::Input)?;
        if methods.contains(&method) {
            return Err(CliError::Input(format!("method '{method}' listed twice")));
        }
        methods.push(method);
    }
    Ok(methods)
}

pub fn load_config(path: Option<&Path>) -> Result<ConfigFile, CliError> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::Input(format!("{}: invalid config: {e}", path.display()))
            })
        }
    }
}

// ---------------------------------------------------------------------------
// validate

struct Check {
    name: String,
    cases: usize,
    max_rel_err: f64,
    pass: bool,
}

fn rel_err(actual: f64, expected: f64) -> f64 {
    if actual == expected {
        return 0.0;
    }
    (actual - expected).abs() / expected.abs().max(f64::MIN_POSITIVE)
}

// Map "the closed form refuses this (p,q) at this n" onto exit 2 with the
// violated constraint spelled out; it is a precondition problem, not a
// validation failure.
fn precondition(err: MomentError) -> CliError {
    CliError::Input(format!(
        "configuration cannot support the validation grid: {err}"
    ))
}

fn oracle_failure(context: &str, err: OracleError) -> CliError {
    CliError::Failed(format!("oracle quadrature failed during {context}: {err}"))
}

fn validation_checks(config: &ExperimentConfig, tol: f64) -> Result<Vec<Check>, CliError> {
    let settings = QuadratureSettings::default();
    let noise = config.noise_prior();
    let joint = config.joint_prior();
    let (phi1, phi2) = (joint.phi1(), joint.phi2());
    let mut checks = Vec::new();

    // exact angular split identity, independent of tol
    {
        let c11 = joint.angular_norm();
        let c13 = angular_constant(1, 3, phi1, phi2).map_err(input_err)?;
        let c31 = angular_constant(3, 1, phi1, phi2).map_err(input_err)?;
        let err = rel_err(c13 + c31, c11);
        checks.push(Check {
            name: "angular_split_identity".into(),
            cases: 1,
            max_rel_err: err,
            pass: err <= 1e-12,
        });
    }

    // closed-form angular constants against direct quadrature
    {
        let mut max_err = 0.0f64;
        for (m, n) in [(1, 1), (1, 3), (3, 1), (1, 5), (5, 1)] {
            let closed = angular_constant(m, n, phi1, phi2).map_err(input_err)?;
            let quad = quad_angular_constant(m, n, phi1, phi2, &settings)
                .map_err(|e| oracle_failure("angular constants", e))?;
            max_err = max_err.max(rel_err(closed, quad));
        }
        checks.push(Check {
            name: "angular_constants_vs_quadrature".into(),
            cases: 5,
            max_rel_err: max_err,
            pass: max_err <= tol,
        });
    }

    // prior normalization under the oracle
    {
        let mass0 = noise_prior_mass(noise, &settings)
            .map_err(|e| oracle_failure("noise prior mass", e))?;
        let mass1 = joint_prior_mass(joint, &settings)
            .map_err(|e| oracle_failure("joint prior mass", e))?;
        let err = rel_err(mass0, 1.0).max(rel_err(mass1, 1.0));
        checks.push(Check {
            name: "prior_normalization".into(),
            cases: 2,
            max_rel_err: err,
            pass: err <= tol,
        });
    }

    let sample_sizes = [2usize, 4, 8];
    let energies = [0.0, 1.0, 10.0, 100.0];

    // noise-only moments q ≤ 2
    {
        let mut max_err = 0.0f64;
        let mut cases = 0;
        for &n in &sample_sizes {
            for &t in &energies {
                let stat = SufficientStatistic::new(n, t).map_err(input_err)?;
                for q in 0..=2u32 {
                    let closed = log_moment_h0(q, &stat, noise).map_err(precondition)?;
                    let quad = quad_log_moment_h0(q, &stat, noise, &settings)
                        .map_err(|e| oracle_failure("H0 moments", e))?;
                    max_err = max_err.max(((closed - quad).exp() - 1.0).abs());
                    cases += 1;
                }
            }
        }
        checks.push(Check {
            name: "moments_h0_vs_quadrature".into(),
            cases,
            max_rel_err: max_err,
            pass: max_err <= tol,
        });
    }

    // signal-plus-noise moments p + q ≤ 2
    {
        let mut max_err = 0.0f64;
        let mut cases = 0;
        for &n in &sample_sizes {
            for &t in &energies {
                let stat = SufficientStatistic::new(n, t).map_err(input_err)?;
                for (p, q) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
                    let closed = log_moment_h1(p, q, &stat, joint).map_err(precondition)?;
                    let quad = quad_log_moment_h1(p, q, &stat, joint, &settings)
                        .map_err(|e| oracle_failure("H1 moments", e))?;
                    max_err = max_err.max(((closed - quad).exp() - 1.0).abs());
                    cases += 1;
                }
            }
        }
        checks.push(Check {
            name: "moments_h1_vs_quadrature".into(),
            cases,
            max_rel_err: max_err,
            pass: max_err <= tol,
        });
    }

    // conditional risks with the blended estimates plugged in
    {
        let mut max_err = 0.0f64;
        let mut cases = 0;
        let costs = config.costs();
        let priors = config.priors();
        for &n in &sample_sizes {
            for t in [1.0, 10.0] {
                let stat = SufficientStatistic::new(n, t).map_err(input_err)?;
                let report = detect_joint(&stat, priors, costs, noise, joint)
                    .map_err(fusion_precondition)?;
                let risks = conditional_risks(&stat, priors, costs, noise, joint)
                    .map_err(fusion_precondition)?;
                let (g1, g0) = (report.gamma1, report.gamma0);
                let quads = [
                    (
                        risks.r00,
                        quad_risk_h0(costs.b00(), costs.a00(), g0.s_hat, g0.v_hat, &stat, noise, &settings),
                    ),
                    (
                        risks.r01,
                        quad_risk_h0(costs.b01(), costs.a01(), g1.s_hat, g1.v_hat, &stat, noise, &settings),
                    ),
                    (
                        risks.r10,
                        quad_risk_h1(costs.b10(), costs.a10(), g0.s_hat, g0.v_hat, &stat, joint, &settings),
                    ),
                    (
                        risks.r11,
                        quad_risk_h1(costs.b11(), costs.a11(), g1.s_hat, g1.v_hat, &stat, joint, &settings),
                    ),
                ];
                for (closed, quad) in quads {
                    let quad = quad.map_err(|e| oracle_failure("conditional risks", e))?;
                    max_err = max_err.max(rel_err(closed, quad));
                    cases += 1;
                }
            }
        }
        checks.push(Check {
            name: "conditional_risks_vs_quadrature".into(),
            cases,
            max_rel_err: max_err,
            pass: max_err <= tol,
        });
    }

    Ok(checks)
}

fn fusion_precondition(err: FusionError) -> CliError {
    CliError::Input(format!(
        "configuration cannot support the validation grid: {err}"
    ))
}

pub fn run_validate(args: &ValidateArgs) -> Result<(), CliError> {
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(CliError::Input(format!(
            "--tol must be a positive real, got {}",
            args.tol
        )));
    }
    let resolved = load_config(args.config.as_deref())?.resolve()?;
    let checks = validation_checks(&resolved.experiment, args.tol)?;
    let mut failures = 0;
    for check in &checks {
        let status = if check.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {:<34} cases {:>3}  max rel err {:.3e}",
            check.name, check.cases, check.max_rel_err
        );
        if !check.pass {
            failures += 1;
        }
    }
    println!(
        "validate: {}/{} checks passed (tol {:e})",
        checks.len() - failures,
        checks.len(),
        args.tol
    );
    if failures > 0 {
        return Err(CliError::Failed(format!(
            "{failures} validation check(s) failed at tolerance {:e}",
            args.tol
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate

fn parse_sweep_spec(raw: &str) -> Result<SweepSpec, CliError> {
    let (name, values) = raw.split_once('=').ok_or_else(|| {
        CliError::Input(format!(
            "sweep spec '{raw}' must look like param=v1,v2,..."
        ))
    })?;
    let name = name.trim();
    if name.is_empty() {
        return Err(CliError::Input(format!("sweep spec '{raw}' has no parameter name")));
    }
    let values = values
        .split(',')
        .map(|v| {
            let v = v.trim();
            v.parse::<f64>().map_err(|_| {
                CliError::Input(format!("sweep value '{v}' for '{name}' is not a number"))
            })
        })
        .collect::<Result<Vec<f64>, CliError>>()?;
    if values.is_empty() {
        return Err(CliError::Input(format!("sweep spec '{raw}' has no values")));
    }
    Ok(SweepSpec {
        name: name.to_string(),
        values,
    })
}

fn format_f64(x: f64) -> String {
    format!("{x}")
}

fn csv_header(specs: &[SweepSpec]) -> String {
    let mut cols: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
    cols.extend([
        "method",
        "trials",
        "detection_error",
        "detection_error_se",
        "signal_mse",
        "signal_mse_se",
        "noise_mse",
        "noise_mse_se",
        "bayes_risk",
        "bayes_risk_se",
    ]);
    cols.join(",")
}

fn csv_row(point: &SweepPoint, metrics: &MethodMetrics) -> String {
    let mut cols: Vec<String> = point
        .assignments
        .iter()
        .map(|(_, value)| format_f64(*value))
        .collect();
    cols.push(metrics.method.to_string());
    cols.push(metrics.trials.to_string());
    for est in [
        metrics.detection_error,
        metrics.signal_mse,
        metrics.noise_mse,
        metrics.bayes_risk,
    ] {
        cols.push(format_f64(est.mean));
        cols.push(format_f64(est.se));
    }
    cols.join(",")
}

/// Companion metadata written next to every CSV; enough to reproduce the
/// run exactly.
#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub config: ConfigFile,
    pub seed: u64,
    pub threads: usize,
    pub methods: Vec<String>,
    pub sweep: Vec<ManifestSweep>,
    pub grid_points: usize,
    pub rows: usize,
    pub output: String,
    pub started_utc: String,
    pub finished_utc: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestSweep {
    pub name: String,
    pub values: Vec<f64>,
}

fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

fn with_thread_pool<T: Send>(
    threads: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Input(format!("cannot build a {threads}-thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn simulate_error(err: MonteCarloError) -> CliError {
    CliError::Input(err.to_string())
}

pub fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let file = load_config(args.config.as_deref())?;
    let resolved = file.resolve()?;
    let seed = args.seed.unwrap_or(resolved.seed);
    let methods = if args.method.is_empty() {
        resolved.methods.clone()
    } else {
        parse_methods(&args.method)?
    };
    let specs = args
        .sweep
        .iter()
        .map(|raw| parse_sweep_spec(raw))
        .collect::<Result<Vec<_>, _>>()?;
    let points = expand_sweep(&resolved.experiment, &specs).map_err(simulate_error)?;

    let started = chrono::Utc::now();
    let rows = with_thread_pool(args.threads, || -> Result<Vec<String>, CliError> {
        let mut rows = Vec::with_capacity(points.len() * methods.len());
        for (index, point) in points.iter().enumerate() {
            let (_, summary) = run_experiment(&point.config, point_seed(seed, index), &methods)
                .map_err(simulate_error)?;
            for metrics in &summary.methods {
                rows.push(csv_row(point, metrics));
            }
        }
        Ok(rows)
    })??;
    let finished = chrono::Utc::now();

    let mut csv = String::with_capacity(64 * (rows.len() + 1));
    csv.push_str(&csv_header(&specs));
    csv.push('\n');
    for row in &rows {
        csv.push_str(row);
        csv.push('\n');
    }
    fs::write(&args.out, csv.as_bytes()).map_err(|e| CliError::io(&args.out, e))?;

    let manifest = Manifest {
        tool: "snrfuse".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: "simulate".into(),
        config: ConfigFile {
            seed,
            methods: methods.iter().map(|m| m.to_string()).collect(),
            ..file
        },
        seed,
        threads: args.threads,
        methods: methods.iter().map(|m| m.to_string()).collect(),
        sweep: specs
            .iter()
            .map(|s| ManifestSweep {
                name: s.name.clone(),
                values: s.values.clone(),
            })
            .collect(),
        grid_points: points.len(),
        rows: rows.len(),
        output: args.out.display().to_string(),
        started_utc: started.to_rfc3339(),
        finished_utc: finished.to_rfc3339(),
    };
    let manifest_file = manifest_path(&args.out);
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .expect("manifest serialization cannot fail");
    fs::write(&manifest_file, manifest_json.as_bytes())
        .map_err(|e| CliError::io(&manifest_file, e))?;

    println!(
        "wrote {} ({} rows, {} grid points) and {}",
        args.out.display(),
        rows.len(),
        points.len(),
        manifest_file.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// estimate

/// Parse whitespace-separated reals, reporting the 1-based line of the
/// first offending token.
fn parse_samples(text: &str) -> Result<Vec<f64>, CliError> {
    let mut samples = Vec::new();
    for (line_index, line) in text.lines().enumerate() {
        for token in line.split_whitespace() {
            let value: f64 = token.parse().map_err(|_| {
                CliError::Input(format!(
                    "line {}: '{token}' is not a real number",
                    line_index + 1
                ))
            })?;
            if !value.is_finite() {
                return Err(CliError::Input(format!(
                    "line {}: sample {value} is not finite",
                    line_index + 1
                )));
            }
            samples.push(value);
        }
    }
    if samples.is_empty() {
        return Err(CliError::Input("no samples in input".into()));
    }
    Ok(samples)
}

fn read_samples(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = if path.as_os_str() == "-" {
        let mut buf = String::new();
        io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::io(Path::new("<stdin>"), e))?;
        buf
    } else {
        fs::read_to_string(path).map_err(|e| CliError::io(path, e))?
    };
    parse_samples(&text)
}

/// The single-line record `estimate` emits.
#[derive(Debug, Serialize)]
pub struct EstimateRecord {
    pub method: Method,
    pub decision: crate::fusion::Decision,
    pub s_hat: f64,
    pub v_hat: f64,
    pub log_lambda1: f64,
    pub log_lambda0: f64,
    pub n: usize,
    pub t: f64,
}

fn estimate_precondition(err: FusionError) -> CliError {
    CliError::Input(format!("cannot estimate with this configuration: {err}"))
}

pub fn run_estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let resolved = load_config(args.config.as_deref())?.resolve()?;
    let method: Method = args.method.parse().map_err(CliError::Input)?;
    let samples = read_samples(&args.data)?;
    let stat = SufficientStatistic::from_samples(&samples).map_err(input_err)?;
    let config = &resolved.experiment;
    let report: DecisionReport = match method {
        Method::Joint => detect_joint(
            &stat,
            config.priors(),
            config.costs(),
            config.noise_prior(),
            config.joint_prior(),
        ),
        Method::Compact => detect_compact(
            &stat,
            config.priors(),
            config.costs(),
            config.noise_prior(),
            config.joint_prior(),
        ),
        Method::Separate => detect_separate(
            &stat,
            config.priors(),
            config.noise_prior(),
            config.joint_prior(),
        ),
    }
    .map_err(estimate_precondition)?;
    let issued = report.issued();
    let record = EstimateRecord {
        method,
        decision: report.decision,
        s_hat: issued.s_hat,
        v_hat: issued.v_hat,
        log_lambda1: report.log_glrs.log_lambda1,
        log_lambda0: report.log_glrs.log_lambda0,
        n: stat.n(),
        t: stat.t(),
    };
    let line = serde_json::to_string(&record).expect("record serialization cannot fail");
    match &args.out {
        None => println!("{line}"),
        Some(path) => {
            let mut file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
            writeln!(file, "{line}").map_err(|e| CliError::io(path, e))?;
        }
    }
    Ok(())
}
