//! Generalized likelihood ratios, blended estimates, conditional risks, and
//! the three decision rules.
//!
//! The jointly optimal scheme couples detection and estimation through the
//! generalized likelihood ratios
//!
//! ```text
//! Λ₁ = b₁₁ π₁ ⟨f₁⟩ / (b₀₁ π₀ ⟨f₀⟩)      Λ₀ = b₁₀ π₁ ⟨f₁⟩ / (b₀₀ π₀ ⟨f₀⟩)
//! ```
//!
//! The issued estimates blend the conditional estimates by posterior weight
//! `Λ/(Λ+1)`, and the detector compares the posterior risks of the two
//! decisions. Three rules are provided:
//!
//! - [`detect_joint`]: the risk-difference rule
//!   `π₁(r₁₀ − r₁₁) ≥ π₀(r₀₁ − r₀₀)`, evaluated in log domain so it
//!   survives sample sizes where the marginal likelihoods underflow. This
//!   rule is authoritative.
//! - [`detect_compact`]: the compact likelihood-ratio form
//!   `(⟨f₁⟩/⟨f₀⟩)·[1 − ŝ_opt + 2 ŝ_opt ŝ^{H1}/(ŝ_opt+1)]·(b₁₁/b₀₀) ≷ π₀/π₁`,
//!   available exactly when the costs satisfy
//!   `b₁₀ = a₁₀ = b₁₁`, `a₁₁ = 0`, `b₀₁ = a₀₁ = b₀₀`, `a₀₀ = 0`.
//! - [`detect_separate`]: the classical split design; a plain Bayesian
//!   likelihood-ratio test with threshold `π₀/π₁` issuing unblended
//!   conditional estimates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    CostParams, HypothesisPriors, JointPriorParams, NoisePriorParams, SufficientStatistic,
};
use crate::moments::{
    conditional_estimates, log_moment_h0, log_moment_h1, posterior_power_moments,
    ConditionalEstimates, MomentError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FusionError {
    #[error(
        "generalized likelihood ratios require strictly positive hypothesis priors, \
         got pi0 = {pi0}, pi1 = {pi1}"
    )]
    DegeneratePriors { pi0: f64, pi1: f64 },
    #[error(
        "the compact rule requires b10 = a10 = b11, a11 = 0, b01 = a01 = b00, a00 = 0; \
         got {costs:?}"
    )]
    CostConditionViolated { costs: CostParams },
    #[error(transparent)]
    Moment(#[from] MomentError),
}

/// Detector output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    /// Declare noise only.
    Gamma0,
    /// Declare signal present.
    Gamma1,
}

impl Decision {
    pub fn declares_signal(self) -> bool {
        matches!(self, Decision::Gamma1)
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Decision::Gamma0 => "gamma0",
            Decision::Gamma1 => "gamma1",
        })
    }
}

/// Which detection-and-estimation design produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Risk-difference rule with blended estimates.
    Joint,
    /// Compact likelihood-ratio form of the joint rule.
    Compact,
    /// Conventional likelihood-ratio test with unblended estimates.
    Separate,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Joint, Method::Compact, Method::Separate];

    pub fn name(self) -> &'static str {
        match self {
            Method::Joint => "joint",
            Method::Compact => "compact",
            Method::Separate => "separate",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "joint" => Ok(Method::Joint),
            "compact" => Ok(Method::Compact),
            "separate" => Ok(Method::Separate),
            other => Err(format!(
                "unknown method '{other}', expected one of: joint, compact, separate"
            )),
        }
    }
}

/// Log generalized likelihood ratios `ln Λ₁`, `ln Λ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogGlrPair {
    pub log_lambda1: f64,
    pub log_lambda0: f64,
}

/// A (signal power, noise power) estimate pair issued by a detector branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatePair {
    pub s_hat: f64,
    pub v_hat: f64,
}

/// Full output of one detector run: the decision plus the estimates either
/// branch would issue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionReport {
    pub decision: Decision,
    /// Estimates issued when declaring signal present.
    pub gamma1: EstimatePair,
    /// Estimates issued when declaring noise only; `s_hat` is always 0.
    pub gamma0: EstimatePair,
    pub log_glrs: LogGlrPair,
    pub conditional: ConditionalEstimates,
}

impl DecisionReport {
    /// The estimate pair matching the decision actually taken.
    pub fn issued(&self) -> EstimatePair {
        match self.decision {
            Decision::Gamma1 => self.gamma1,
            Decision::Gamma0 => self.gamma0,
        }
    }
}

/// Unnormalized conditional risks `r_ij = ⟨C_ij f_i⟩` of truth `H_i` and
/// decision `γ_j`, with the blended estimates plugged in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalRisks {
    pub r00: f64,
    pub r01: f64,
    pub r10: f64,
    pub r11: f64,
}

/// Posterior weight `Λ/(Λ+1)` of `H1` from `ln Λ`, two-branch for stability.
pub fn posterior_weight(log_lambda: f64) -> f64 {
    if log_lambda >= 0.0 {
        1.0 / (1.0 + (-log_lambda).exp())
    } else {
        let e = log_lambda.exp();
        e / (1.0 + e)
    }
}

/// `ln(⟨f₁⟩/⟨f₀⟩)`, the cost- and prior-free likelihood-ratio core.
pub fn log_likelihood_ratio(
    stat: &SufficientStatistic,
    noise_prior: &NoisePriorParams,
    joint_prior: &JointPriorParams,
) -> Result<f64, MomentError> {
    Ok(log_moment_h1(0, 0, stat, joint_prior)? - log_moment_h0(0, stat, noise_prior)?)
}

fn require_positive_priors(priors: &HypothesisPriors) -> Result<(), FusionError> {
    if priors.pi0() <= 0.0 || priors.pi1() <= 0.0 {
        return Err(FusionError::DegeneratePriors {
            pi0: priors.pi0(),
            pi1: priors.pi1(),
        });
    }
    Ok(())
}

/// Both log generalized likelihood ratios. [`CostParams`] guarantees the
/// conversion weights `b_ij` are strictly positive, so only degenerate
/// hypothesis priors can fail here.
pub fn log_glrs(
    stat: &SufficientStatistic,
    priors: &HypothesisPriors,
    costs: &CostParams,
    noise_prior: &NoisePriorParams,
    joint_prior: &JointPriorParams,
) -> Result<LogGlrPair, FusionError> {
    require_positive_priors(priors)?;
    let core = log_likelihood_ratio(stat, noise_prior, joint_prior)?;
    let prior_term = priors.pi1().ln() - priors.pi0().ln();
    Ok(LogGlrPair {
        log_lambda1: costs.b11().ln() - costs.b01().ln() + prior_term + core,
        log_lambda0: costs.b10().ln() - costs.b00().ln() + prior_term + core,
    })
}

/// `ŝ_opt = Λ₁/(Λ₁+1) · ŝ^{H1}`.
pub fn optimal_signal_estimate(glrs: &LogGlrPair, conditional: &ConditionalEstimates) -> f64 {
    posterior_weight(glrs.log_lambda1) * conditional.s_h1
}

/// `(v̂_γ1, v̂_γ0)` with `v̂_γj = Λⱼ/(Λⱼ+1)·v̂^{H1} + 1/(Λⱼ+1)·v̂^{H0}`.
///
/// The two logistic weights sum to 1 only up to rounding, so the raw blend
/// can leave the convex hull of the endpoints by an ulp or two; a final
/// clamp restores the exact interval guarantee.
pub fn optimal_noise_estimates(
    glrs: &LogGlrPair,
    conditional: &ConditionalEstimates,
) -> (f64, f64) {
    let lo = conditional.v_h0.min(conditional.v_h1);
    let hi = conditional.v_h0.max(conditional.v_h1);
    let blend = |log_lambda: f64| {
        let raw = posterior_weight(log_lambda) * conditional.v_h1
            + posterior_weight(-log_lambda) * conditional.v_h0;
        raw.clamp(lo, hi)
    };
    (blend(glrs.log_lambda1), blend(glrs.log_lambda0))
}

struct BlendedEstimates {
    glrs: LogGlrPair,
    conditional: ConditionalEstimates,
    gamma1: EstimatePair,
    gamma0: EstimatePair,
}

fn blended_estimates(
    stat: &SufficientStatistic,
    priors: &HypothesisPriors,
    costs: &CostParams,
    noise_prior: &NoisePriorParams,
    joint_prior: &JointPriorParams,
) -> Result<BlendedEstimates, FusionError> {
    let glrs = log_glrs(stat, priors, costs, noise_prior, joint_prior)?;
    let conditional = conditional_estimates(stat, noise_prior, joint_prior)?;
    let s_opt = optimal_signal_estimate(&glrs, &conditional);
    let (v_gamma1, v_gamma0) = optimal_noise_estimates(&glrs, &conditional);
    Ok(BlendedEstimates {
        glrs,
        conditional,
        gamma1: EstimatePair {
            s_hat: s_opt,
            v_hat: v_gamma1,
        },
        gamma0: EstimatePair {
            s_hat: 0.0,
            v_hat: v_gamma0,
        },
    })
}

// Posterior-normalized expected costs g_ij = r_ij / ⟨f_i⟩ written as
// variance plus squared bias, which keeps every term nonnegative.
struct NormalizedCosts {
    g00: f64,
    g01: f64,
    g10: f64,
    g11: f64,
}

fn normalized_costs(
    stat: &SufficientStatistic,
    costs: &CostParams,
    noise_prior: &NoisePriorParams,
    joint_prior: &JointPriorParams,
    gamma1: &EstimatePair,
    gamma0: &EstimatePair,
) -> Result<NormalizedCosts, FusionError> {
    let pm = posterior_power_moments(stat, noise_prior, joint_prior)?;
    let h0_cost = |pair: &EstimatePair| {
        let bias_v = pm.e_v_h0 - pair.v_hat;
        pair.s_hat * pair.s_hat + pm.var_v_h0() + bias_v * bias_v
    };
    let h1_cost = |pair: &EstimatePair| {
        let bias_s = pm.e_s - pair.s_hat;
        let bias_v = pm.e_v - pair.v_hat;
        pm.var_s() + bias_s * bias_s + pm.var_v() + bias_v * bias_v
    };
    Ok(NormalizedCosts {
        g00: costs.b00() * h0_cost(gamma0) + costs.a00(),
        g01: costs.b01() * h0_cost(gamma1) + costs.a01(),
        g10: costs.b10() * h1_cost(gamma0) + costs.a10(),
        g11: costs.b11() * h1_cost(gamma1) + costs.a11(),
    })
}

/// The four conditional risks with the blended estimates plugged in.
///
/// Returned on the linear scale; for large `n` the marginal likelihood
/// factors underflow and the risks round to zero, so use [`detect_joint`]
/// (which compares them in log domain) rather than these values when
/// deciding.
pub fn conditional_risks(
    stat: &SufficientStatistic,
    priors: &HypothesisPriors,
    costs: &CostParams,
    noise_prior: &NoisePriorParams,
    joint_prior: &JointPriorParams,
) -> Result<ConditionalRisks, FusionError> {
    let blend = blended_estimates(stat, priors, costs, noise_prior, joint_prior)?;
    let g = normalized_costs(stat, costs, noise_prior, joint_prior, &blend.gamma1, &blend.gamma0)?;
    let m0 = log_moment_h0(0, stat, noise_prior)?.exp();
    let m1 = log_moment_h1(0, 0, stat, joint_prior)?.exp();
    Ok(ConditionalRisks {
        r00: m0 * g.g00,
        r01: m0 * g.g01,
        r10: m1 * g.g10,
        r11: m1 * g.g11,
    })
}

// Decide γ₁ iff Δ₀ ≤ e^{log_odds}·Δ₁ where Δ₀ = g₀(γ₁) − g₀(γ₀),
// Δ₁ = g₁(γ₀) − g₁(γ₁), log_odds = ln(π₁⟨f₁⟩/(π₀⟨f₀⟩)). Sign-split so no
// exponential is ever formed.
fn risk_rule_prefers_gamma1(delta0: f64, delta1: f64, log_odds: f64) -> bool {
    if delta1 > 0.0 {
        if delta0 <= 0.0 {
            true
        } else {
            delta0.ln() - delta1.ln() <= log_odds
        }
    } else if delta1 == 0.0 {
        delta0 <= 0.0
    } else {
        delta0 < 0.0 && (-delta0).ln() - (-delta1).ln() >= log_odds
    }
}

/// Risk-difference detector: declare `γ₁` iff
/// `π₁(r₁₀ − r₁₁) ≥ π₀(r₀₁ − r₀₀)`, ties going to `γ₁`.
///
/// The comparison is carried out on posterior-normalized risks with the
/// marginal-likelihood ratio applied in log domain, so it remains exact when
/// the `r_ij` themselves underflow.
pub fn detect_joint(
    stat: &SufficientStatistic,
    priors: &HypothesisPriors,
    costs: &CostParams,
    noise_prior: &NoisePriorParams,
    joint_prior: &JointPriorParams,
) -> Result<DecisionReport, FusionError> {
    let blend = blended_estimates(stat, priors, costs, noise_prior, joint_prior)?;
    let g = normalized_costs(stat, costs, noise_prior, joint_prior, &blend.gamma1, &blend.gamma0)?;
    let core = log_likelihood_ratio(stat, noise_prior, joint_prior)?;
    let log_odds = priors.pi1().ln() - priors.pi0().ln() + core;
    let decision = if risk_rule_prefers_gamma1(g.g01 - g.g00, g.g10 - g.g11, log_odds) {
        Decision::Gamma1
    } else {
        Decision::Gamma0
    };
    Ok(DecisionReport {
        decision,
        gamma1: blend.gamma1,
        gamma0: blend.gamma0,
        log_glrs: blend.glrs,
        conditional: blend.conditional,
    })
}

fn satisfies_compact_condition(costs: &CostParams) -> bool {
    costs.b10() == costs.a10()
        && costs.a10() == costs.b11()
        && costs.a11() == 0.0
        && costs.b01() == costs.a01()
        && costs.a01() == costs.b00()
        && costs.a00() == 0.0
}

/// The compact rule as a standalone comparison: declare `γ₁` iff
///
/// ```text
/// ln(⟨f₁⟩/⟨f₀⟩) + ln[1 − ŝ_opt + 2 ŝ_opt ŝ^{H1}/(ŝ_opt + 1)]
///     + ln(b₁₁/b₀₀) ≥ ln(π₀/π₁)
/// ```
///
/// The bracket is bounded below by `2(√2 − 1) ≈ 0.83` for any
/// `ŝ_opt = w·ŝ^{H1}` with `w ∈ [0, 1]`, so its logarithm is always finite.
/// With `ŝ_opt = 0` and `b₁₁ = b₀₀` both correction terms are exactly zero
/// and the comparison reduces bit-for-bit to [`separate_rule`].
pub fn compact_rule(
    log_likelihood_ratio: f64,
    s_opt: f64,
    s_h1: f64,
    costs: &CostParams,
    priors: &HypothesisPriors,
) -> Decision {
    let bracket = 1.0 - s_opt + 2.0 * s_opt * s_h1 / (s_opt + 1.0);
    let lhs = log_likelihood_ratio + bracket.ln() + (costs.b11().ln() - costs.b00().ln());
    let rhs = priors.pi0().ln() - priors.pi1().ln();
    if lhs >= rhs {
        Decision::Gamma1
    } else {
        Decision::Gamma0
    }
}

/// Compact-form detector. Errors unless the costs satisfy
/// `b₁₀ = a₁₀ = b₁₁`, `a₁₁ = 0`, `b₀₁ = a₀₁ = b₀₀`, `a₀₀ = 0` exactly.
pub fn detect_compact(
    stat: &SufficientStatistic,
    priors: &HypothesisPriors,
    costs: &CostParams,
    noise_prior: &NoisePriorParams,
    joint_prior: &JointPriorParams,
) -> Result<DecisionReport, FusionError> {
    if !satisfies_compact_condition(costs) {
        return Err(FusionError::CostConditionViolated { costs: *costs });
    }
    let blend = blended_estimates(stat, priors, costs, noise_prior, joint_prior)?;
    let core = log_likelihood_ratio(stat, noise_prior, joint_prior)?;
    let decision = compact_rule(core, blend.gamma1.s_hat, blend.conditional.s_h1, costs, priors);
    Ok(DecisionReport {
        decision,
        gamma1: blend.gamma1,
        gamma0: blend.gamma0,
        log_glrs: blend.glrs,
        conditional: blend.conditional,
    })
}

/// Separate-design rule: declare `γ₁` iff `ln(⟨f₁⟩/⟨f₀⟩) ≥ ln(π₀/π₁)`.
pub fn separate_rule(log_likelihood_ratio: f64, priors: &HypothesisPriors) -> Decision {
    if log_likelihood_ratio >= priors.pi0().ln() - priors.pi1().ln() {
        Decision::Gamma1
    } else {
        Decision::Gamma0
    }
}

/// Separate-design detector: likelihood-ratio test plus unblended
/// conditional estimates (`ŝ^{H1}`, `v̂^{H1}` under `γ₁`; `0`, `v̂^{H0}`
/// under `γ₀`).
///
/// Costs never enter; the `log_glrs` field of the report carries the plain
/// posterior odds in both slots.
pub fn detect_separate(
    stat: &SufficientStatistic,
    priors: &HypothesisPriors,
    noise_prior: &NoisePriorParams,
    joint_prior: &JointPriorParams,
) -> Result<DecisionReport, FusionError> {
    require_positive_priors(priors)?;
    let core = log_likelihood_ratio(stat, noise_prior, joint_prior)?;
    let conditional = conditional_estimates(stat, noise_prior, joint_prior)?;
    let posterior_odds = priors.pi1().ln() - priors.pi0().ln() + core;
    Ok(DecisionReport {
        decision: separate_rule(core, priors),
        gamma1: EstimatePair {
            s_hat: conditional.s_h1,
            v_hat: conditional.v_h1,
        },
        gamma0: EstimatePair {
            s_hat: 0.0,
            v_hat: conditional.v_h0,
        },
        log_glrs: LogGlrPair {
            log_lambda1: posterior_odds,
            log_lambda0: posterior_odds,
        },
        conditional,
    })
}
