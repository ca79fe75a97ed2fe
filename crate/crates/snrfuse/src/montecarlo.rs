//! Deterministic, parallel Monte Carlo comparison of the detection designs.
//!
//! Every trial draws a hypothesis, true powers, and an observation vector,
//! then runs each requested method on the same data and scores the realized
//! detection-plus-estimation cost. Trial `i` of a run seeded with `seed`
//! always uses `ChaCha8Rng::seed_from_u64(seed)` switched to stream `i`, and
//! trials are collected in index order, so results are byte-identical for
//! any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fusion::{
    detect_compact, detect_joint, detect_separate, Decision, DecisionReport, FusionError, Method,
};
use crate::model::{
    sample_noise_power, sample_power_pair, CostParams, HypothesisPriors, JointPriorParams,
    ModelError, NoisePriorParams, PowerPair, SufficientStatistic,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error("trials must be at least 1")]
    ZeroTrials,
    #[error(
        "mean-square risks diverge for this configuration: need alpha1 + n/2 > 3 and \
         alpha0 + n/2 > 2, got alpha0 = {alpha0}, alpha1 = {alpha1}, n = {n}"
    )]
    DivergentRisk { alpha0: f64, alpha1: f64, n: usize },
    #[error("s_hat_scale must be finite and nonnegative, got {value}")]
    InvalidScale { value: f64 },
    #[error("unknown sweep parameter '{name}'")]
    UnknownSweepParameter { name: String },
    #[error("sweep parameter '{name}' has no values")]
    EmptySweep { name: String },
    #[error("sweep parameter '{name}' requires a positive integer, got {value}")]
    NonIntegerSweepValue { name: String, value: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
}

/// A fully validated experiment description.
///
/// Construction checks that the second-moment risks every detector needs are
/// finite for the given sample size, so a run can only fail on resource
/// errors, never mid-stream on mathematics.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    trials: usize,
    n: usize,
    priors: HypothesisPriors,
    costs: CostParams,
    noise_prior: NoisePriorParams,
    joint_prior: JointPriorParams,
    s_hat_scale: f64,
}

impl ExperimentConfig {
    pub fn new(
        trials: usize,
        n: usize,
        priors: HypothesisPriors,
        costs: CostParams,
        noise_prior: NoisePriorParams,
        joint_prior: JointPriorParams,
    ) -> Result<Self, MonteCarloError> {
        if trials == 0 {
            return Err(MonteCarloError::ZeroTrials);
        }
        let half_n = n as f64 / 2.0;
        if n == 0
            || joint_prior.alpha1() + half_n - 3.0 <= 0.0
            || noise_prior.alpha0() + half_n - 2.0 <= 0.0
        {
            return Err(MonteCarloError::DivergentRisk {
                alpha0: noise_prior.alpha0(),
                alpha1: joint_prior.alpha1(),
                n,
            });
        }
        Ok(Self {
            trials,
            n,
            priors,
            costs,
            noise_prior,
            joint_prior,
            s_hat_scale: 1.0,
        })
    }

    /// Scale factor applied to the blended signal estimate `ŝ_opt` issued by
    /// the joint designs under `γ₁`. `1.0` is the optimal estimator; other
    /// values deliberately perturb it for sensitivity probes. The decision
    /// itself is never affected.
    pub fn with_s_hat_scale(mut self, scale: f64) -> Result<Self, MonteCarloError> {
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(MonteCarloError::InvalidScale { value: scale });
        }
        self.s_hat_scale = scale;
        Ok(self)
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn priors(&self) -> &HypothesisPriors {
        &self.priors
    }

    pub fn costs(&self) -> &CostParams {
        &self.costs
    }

    pub fn noise_prior(&self) -> &NoisePriorParams {
        &self.noise_prior
    }

    pub fn joint_prior(&self) -> &JointPriorParams {
        &self.joint_prior
    }

    pub fn s_hat_scale(&self) -> f64 {
        self.s_hat_scale
    }
}

/// True state of nature in one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    H0,
    H1,
}

impl Hypothesis {
    pub fn signal_present(self) -> bool {
        matches!(self, Hypothesis::H1)
    }
}

/// Drawn ground truth plus the derived sufficient statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub hypothesis: Hypothesis,
    pub truth: PowerPair,
    pub stat: SufficientStatistic,
}

/// One method's scored result on one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodOutcome {
    pub method: Method,
    pub decision: Decision,
    /// Issued signal-power estimate (after any `s_hat_scale` perturbation).
    pub s_hat: f64,
    pub v_hat: f64,
    pub detection_error: bool,
    pub signal_sq_err: f64,
    pub noise_sq_err: f64,
    /// Realized cost `b_ij[(s − ŝ)² + (v − v̂)²] + a_ij`.
    pub cost: f64,
}

/// Everything recorded about one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub hypothesis: Hypothesis,
    pub truth: PowerPair,
    pub outcomes: Vec<MethodOutcome>,
}

impl TrialRecord {
    pub fn outcome(&self, method: Method) -> Option<&MethodOutcome> {
        self.outcomes.iter().find(|o| o.method == method)
    }
}

/// Sample mean and its standard error (sample standard deviation with the
/// `n − 1` denominator, divided by `√n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricEstimate {
    pub mean: f64,
    pub se: f64,
}

fn metric_estimate(values: impl ExactSizeIterator<Item = f64> + Clone) -> MetricEstimate {
    let n = values.len();
    if n == 0 {
        return MetricEstimate { mean: 0.0, se: 0.0 };
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return MetricEstimate { mean, se: 0.0 };
    }
    let ss = values.map(|x| (x - mean) * (x - mean)).sum::<f64>();
    MetricEstimate {
        mean,
        se: (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt(),
    }
}

/// Aggregated metrics for one method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MethodMetrics {
    pub method: Method,
    pub trials: usize,
    pub detection_error: MetricEstimate,
    pub signal_mse: MetricEstimate,
    pub noise_mse: MetricEstimate,
    pub bayes_risk: MetricEstimate,
}

/// Aggregated metrics for every method in a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsSummary {
    pub trials: usize,
    pub methods: Vec<MethodMetrics>,
}

impl MetricsSummary {
    pub fn metrics(&self, method: Method) -> Option<&MethodMetrics> {
        self.methods.iter().find(|m| m.method == method)
    }
}

/// Draw one trial's ground truth and observations.
///
/// The stream layout is part of the determinism contract: one uniform for
/// the hypothesis, then the power draw(s), then `n` standard normals scaled
/// by the true standard deviation.
pub fn generate_trial<R: Rng + ?Sized>(
    rng: &mut R,
    config: &ExperimentConfig,
) -> Result<Trial, MonteCarloError> {
    let u: f64 = rng.random();
    let (hypothesis, truth) = if u < config.priors.pi1() {
        (Hypothesis::H1, sample_power_pair(rng, &config.joint_prior))
    } else {
        let v = sample_noise_power(rng, &config.noise_prior);
        (Hypothesis::H0, PowerPair::new(0.0, v)?)
    };
    let sigma = truth.total().sqrt();
    let mut samples = vec![0.0f64; config.n];
    for x in &mut samples {
        let z: f64 = StandardNormal.sample(rng);
        *x = sigma * z;
    }
    let stat = SufficientStatistic::from_samples(&samples)?;
    Ok(Trial {
        hypothesis,
        truth,
        stat,
    })
}

fn realized_cost(
    costs: &CostParams,
    hypothesis: Hypothesis,
    decision: Decision,
    signal_sq_err: f64,
    noise_sq_err: f64,
) -> f64 {
    let (b, a) = match (hypothesis, decision) {
        (Hypothesis::H0, Decision::Gamma0) => (costs.b00(), costs.a00()),
        (Hypothesis::H0, Decision::Gamma1) => (costs.b01(), costs.a01()),
        (Hypothesis::H1, Decision::Gamma0) => (costs.b10(), costs.a10()),
        (Hypothesis::H1, Decision::Gamma1) => (costs.b11(), costs.a11()),
    };
    b * (signal_sq_err + noise_sq_err) + a
}

fn evaluate_method(
    config: &ExperimentConfig,
    trial: &Trial,
    method: Method,
) -> Result<MethodOutcome, MonteCarloError> {
    let report: DecisionReport = match method {
        Method::Joint => detect_joint(
            &trial.stat,
            &config.priors,
            &config.costs,
            &config.noise_prior,
            &config.joint_prior,
        )?,
        Method::Compact => detect_compact(
            &trial.stat,
            &config.priors,
            &config.costs,
            &config.noise_prior,
            &config.joint_prior,
        )?,
        Method::Separate => detect_separate(
            &trial.stat,
            &config.priors,
            &config.noise_prior,
            &config.joint_prior,
        )?,
    };
    let mut issued = report.issued();
    if matches!(method, Method::Joint | Method::Compact) && report.decision.declares_signal() {
        issued.s_hat *= config.s_hat_scale;
    }
    let detection_error = trial.hypothesis.signal_present() != report.decision.declares_signal();
    let ds = trial.truth.s() - issued.s_hat;
    let dv = trial.truth.v() - issued.v_hat;
    let signal_sq_err = ds * ds;
    let noise_sq_err = dv * dv;
    Ok(MethodOutcome {
        method,
        decision: report.decision,
        s_hat: issued.s_hat,
        v_hat: issued.v_hat,
        detection_error,
        signal_sq_err,
        noise_sq_err,
        cost: realized_cost(
            &config.costs,
            trial.hypothesis,
            report.decision,
            signal_sq_err,
            noise_sq_err,
        ),
    })
}

/// Run one trial end to end. The trial's generator depends only on
/// `(seed, trial_index)`.
pub fn run_trial(
    config: &ExperimentConfig,
    seed: u64,
    trial_index: u64,
    methods: &[Method],
) -> Result<TrialRecord, MonteCarloError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    let trial = generate_trial(&mut rng, config)?;
    let mut outcomes = Vec::with_capacity(methods.len());
    for &method in methods {
        outcomes.push(evaluate_method(config, &trial, method)?);
    }
    Ok(TrialRecord {
        trial_index,
        hypothesis: trial.hypothesis,
        truth: trial.truth,
        outcomes,
    })
}

/// Aggregate per-trial records into mean/standard-error metrics, in the
/// order the records are given.
pub fn aggregate(records: &[TrialRecord], methods: &[Method]) -> MetricsSummary {
    let methods_out = methods
        .iter()
        .map(|&method| {
            let values: Vec<&MethodOutcome> = records
                .iter()
                .filter_map(|r| r.outcome(method))
                .collect();
            MethodMetrics {
                method,
                trials: values.len(),
                detection_error: metric_estimate(
                    values
                        .iter()
                        .map(|o| if o.detection_error { 1.0 } else { 0.0 }),
                ),
                signal_mse: metric_estimate(values.iter().map(|o| o.signal_sq_err)),
                noise_mse: metric_estimate(values.iter().map(|o| o.noise_sq_err)),
                bayes_risk: metric_estimate(values.iter().map(|o| o.cost)),
            }
        })
        .collect();
    MetricsSummary {
        trials: records.len(),
        methods: methods_out,
    }
}

/// Run all trials of `config` in parallel on the current rayon pool and
/// aggregate. Records come back sorted by trial index regardless of thread
/// scheduling.
pub fn run_experiment(
    config: &ExperimentConfig,
    seed: u64,
    methods: &[Method],
) -> Result<(Vec<TrialRecord>, MetricsSummary), MonteCarloError> {
    let records = (0..config.trials() as u64)
        .into_par_iter()
        .map(|i| run_trial(config, seed, i, methods))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = aggregate(&records, methods);
    Ok((records, summary))
}

/// Mean and standard error of the per-trial cost difference
/// `cost(a) − cost(b)`. Pairing on shared trials makes the comparison far
/// sharper than differencing two independent means.
pub fn paired_cost_difference(
    records: &[TrialRecord],
    a: Method,
    b: Method,
) -> Option<MetricEstimate> {
    let diffs: Vec<f64> = records
        .iter()
        .filter_map(|r| Some(r.outcome(a)?.cost - r.outcome(b)?.cost))
        .collect();
    if diffs.len() != records.len() || diffs.is_empty() {
        return None;
    }
    Some(metric_estimate(diffs.iter().copied()))
}

/// One named parameter with the list of values to sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub values: Vec<f64>,
}

/// One grid point of a sweep: the resolved assignments (in spec order) and
/// the config they produce.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub assignments: Vec<(String, f64)>,
    pub config: ExperimentConfig,
}

fn positive_integer(name: &str, value: f64) -> Result<usize, MonteCarloError> {
    if value.fract() != 0.0 || value < 1.0 || value > usize::MAX as f64 {
        return Err(MonteCarloError::NonIntegerSweepValue {
            name: name.to_string(),
            value,
        });
    }
    Ok(value as usize)
}

/// Rebuild `config` with one parameter replaced, revalidating everything.
///
/// Supported names: `trials`, `n`, `pi1` (with `pi0 = 1 − pi1`), `alpha0`,
/// `beta0`, `alpha1`, `beta1`, `alpha` (sets `alpha0` and `alpha1`
/// together), `phi1`, `phi2`, `s_hat_scale`.
pub fn apply_parameter(
    config: &ExperimentConfig,
    name: &str,
    value: f64,
) -> Result<ExperimentConfig, MonteCarloError> {
    let mut trials = config.trials;
    let mut n = config.n;
    let mut priors = config.priors;
    let costs = config.costs;
    let mut noise = config.noise_prior;
    let mut joint = config.joint_prior;
    let mut s_hat_scale = config.s_hat_scale;
    match name {
        "trials" => trials = positive_integer(name, value)?,
        "n" => n = positive_integer(name, value)?,
        "pi1" => priors = HypothesisPriors::new(1.0 - value, value)?,
        "alpha0" => noise = NoisePriorParams::new(value, noise.beta0())?,
        "beta0" => noise = NoisePriorParams::new(noise.alpha0(), value)?,
        "alpha1" => {
            joint = JointPriorParams::new(value, joint.beta1(), joint.phi1(), joint.phi2())?
        }
        "beta1" => {
            joint = JointPriorParams::new(joint.alpha1(), value, joint.phi1(), joint.phi2())?
        }
        "alpha" => {
            noise = NoisePriorParams::new(value, noise.beta0())?;
            joint = JointPriorParams::new(value, joint.beta1(), joint.phi1(), joint.phi2())?;
        }
        "phi1" => {
            joint = JointPriorParams::new(joint.alpha1(), joint.beta1(), value, joint.phi2())?
        }
        "phi2" => {
            joint = JointPriorParams::new(joint.alpha1(), joint.beta1(), joint.phi1(), value)?
        }
        "s_hat_scale" => s_hat_scale = value,
        _ => {
            return Err(MonteCarloError::UnknownSweepParameter {
                name: name.to_string(),
            })
        }
    }
    ExperimentConfig::new(trials, n, priors, costs, noise, joint)?.with_s_hat_scale(s_hat_scale)
}

/// Expand sweep specs into the full grid (cartesian product, first spec
/// outermost). No specs yields the base config as a single unnamed point.
pub fn expand_sweep(
    base: &ExperimentConfig,
    specs: &[SweepSpec],
) -> Result<Vec<SweepPoint>, MonteCarloError> {
    for spec in specs {
        if spec.values.is_empty() {
            return Err(MonteCarloError::EmptySweep {
                name: spec.name.clone(),
            });
        }
    }
    let mut points = vec![SweepPoint {
        assignments: Vec::new(),
        config: base.clone(),
    }];
    for spec in specs {
        let mut next = Vec::with_capacity(points.len() * spec.values.len());
        for point in &points {
            for &value in &spec.values {
                let config = apply_parameter(&point.config, &spec.name, value)?;
                let mut assignments = point.assignments.clone();
                assignments.push((spec.name.clone(), value));
                next.push(SweepPoint {
                    assignments,
                    config,
                });
            }
        }
        points = next;
    }
    Ok(points)
}

/// Seed for sweep point `index`, derived from the base seed by a Weyl step
/// so distinct points get distinct streams while point 0 keeps the base
/// seed (an empty sweep therefore equals a single run).
pub fn point_seed(base_seed: u64, index: usize) -> u64 {
    base_seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Expand the sweep grid and run the full experiment at every point with
/// per-point derived seeds. Returns summaries in grid order; per-trial
/// records are dropped point by point to keep memory flat.
pub fn run_sweep(
    base: &ExperimentConfig,
    specs: &[SweepSpec],
    base_seed: u64,
    methods: &[Method],
) -> Result<Vec<(SweepPoint, MetricsSummary)>, MonteCarloError> {
    let points = expand_sweep(base, specs)?;
    points
        .into_iter()
        .enumerate()
        .map(|(index, point)| {
            let (_, summary) = run_experiment(&point.config, point_seed(base_seed, index), methods)?;
            Ok((point, summary))
        })
        .collect()
}
