//! Jointly optimal Bayesian detection and signal/noise power estimation for
//! i.i.d. zero-mean Gaussian observations.
//!
//! An observation vector is either pure noise (`H0`, variance `v`) or signal
//! plus noise (`H1`, variance `s + v`). Conjugate priors (inverse-gamma on
//! the noise power under `H0`; an inverse-gamma total power combined with an
//! angular density on the signal/noise split under `H1`) make every
//! prior-weighted likelihood moment available in closed form. On top of those
//! moments the crate provides:
//!
//! - the conditional power estimates under each hypothesis and the
//!   posterior-probability-blended estimates that minimize the combined
//!   detection-plus-estimation Bayes risk ([`fusion`]),
//! - three detectors: the risk-difference rule, its compact
//!   likelihood-ratio form, and the classical separate-design baseline,
//! - an adaptive-quadrature oracle that validates every closed form by
//!   brute-force integration ([`oracle`]),
//! - a deterministic, parallel Monte Carlo harness comparing the joint and
//!   separate designs ([`montecarlo`]),
//! - a thin CLI (`validate`, `simulate`, `estimate`) over all of the above
//!   ([`cli`]).
//!
//! Start with the runnable programs in `examples/`; each one exercises a
//! single capability end to end.

pub mod cli;
pub mod fusion;
pub mod model;
pub mod moments;
pub mod montecarlo;
pub mod oracle;

pub use fusion::{Decision, DecisionReport, LogGlrPair, Method};
pub use model::{
    CostParams, HypothesisPriors, JointPriorParams, NoisePriorParams, PowerPair,
    SufficientStatistic,
};
pub use moments::ConditionalEstimates;
pub use montecarlo::{ExperimentConfig, MetricsSummary, TrialRecord};
