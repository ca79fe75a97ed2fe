//! Closed-form prior-weighted likelihood moments and conditional estimates.
//!
//! Conjugacy reduces every moment to gamma-function identities. With
//! `N` samples of energy `T`,
//!
//! ```text
//! ln ⟨v^q f₀⟩ = α₀ ln β₀ − (N/2) ln 2π − ln Γ(α₀)
//!               + ln Γ(α₀ + N/2 − q) − (α₀ + N/2 − q) ln(β₀ + T/2)
//!
//! ln ⟨s^p v^q f₁⟩ = ln(C_{1+2q,1+2p}/C₁₁) + (α₁ − 1) ln β₁ − (N/2) ln 2π
//!                   − ln Γ(α₁ − 1) + ln Γ(α₁ + N/2 − 1 − p − q)
//!                   − (α₁ + N/2 − 1 − p − q) ln(β₁ + T/2)
//! ```
//!
//! valid while the posterior gamma shape stays positive. Results are kept in
//! log domain; the conditional estimates, which are ratios of adjacent
//! moments, collapse to cancellation-free closed forms and are computed
//! directly.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::model::{
    angular_constant, JointPriorParams, ModelError, NoisePriorParams, SufficientStatistic,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentError {
    /// The posterior gamma shape is not positive, so the requested moment
    /// integral diverges.
    #[error(
        "moment of order {order} diverges: posterior shape {shape} is not positive \
         (alpha = {alpha}, n = {n})"
    )]
    DivergentMoment {
        shape: f64,
        alpha: f64,
        n: usize,
        order: u32,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `ln ⟨v^q f₀(y|v)⟩_V` for the inverse-gamma noise prior.
pub fn log_moment_h0(
    q: u32,
    stat: &SufficientStatistic,
    prior: &NoisePriorParams,
) -> Result<f64, MomentError> {
    let alpha0 = prior.alpha0();
    let shape = alpha0 + stat.half_n() - q as f64;
    if shape <= 0.0 {
        return Err(MomentError::DivergentMoment {
            shape,
            alpha: alpha0,
            n: stat.n(),
            order: q,
        });
    }
    Ok(alpha0 * prior.beta0().ln() - stat.half_n() * (2.0 * PI).ln() - ln_gamma(alpha0)
        + ln_gamma(shape)
        - shape * (prior.beta0() + stat.t() / 2.0).ln())
}

/// `ln ⟨s^p v^q f₁(y|s,v)⟩_{S,V}` for the joint signal/noise prior.
pub fn log_moment_h1(
    p: u32,
    q: u32,
    stat: &SufficientStatistic,
    prior: &JointPriorParams,
) -> Result<f64, MomentError> {
    let alpha1 = prior.alpha1();
    let shape = alpha1 + stat.half_n() - 1.0 - (p + q) as f64;
    if shape <= 0.0 {
        return Err(MomentError::DivergentMoment {
            shape,
            alpha: alpha1,
            n: stat.n(),
            order: p + q,
        });
    }
    // v^q contributes sin^{2q}, s^p contributes cos^{2p} on top of the
    // angular density 2 sinθ cosθ / C₁₁
    let angular = angular_constant(1 + 2 * q, 1 + 2 * p, prior.phi1(), prior.phi2())?;
    Ok((angular / prior.angular_norm()).ln() + (alpha1 - 1.0) * prior.beta1().ln()
        - stat.half_n() * (2.0 * PI).ln()
        - ln_gamma(alpha1 - 1.0)
        + ln_gamma(shape)
        - shape * (prior.beta1() + stat.t() / 2.0).ln())
}

/// Posterior-mean power estimates under each hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalEstimates {
    /// `ŝ^{H1} = ⟨s f₁⟩ / ⟨f₁⟩`, the signal power given a signal is present.
    pub s_h1: f64,
    /// `v̂^{H1} = ⟨v f₁⟩ / ⟨f₁⟩`, the noise power given a signal is present.
    pub v_h1: f64,
    /// `v̂^{H0} = ⟨v f₀⟩ / ⟨f₀⟩`, the noise power given noise only.
    pub v_h0: f64,
}

/// Conditional estimates in their reduced closed forms:
///
/// ```text
/// ŝ^{H1} = (C₁₃/C₁₁) (β₁ + T/2)/(α₁ + N/2 − 2)
/// v̂^{H1} = (C₃₁/C₁₁) (β₁ + T/2)/(α₁ + N/2 − 2)
/// v̂^{H0} =           (β₀ + T/2)/(α₀ + N/2 − 1)
/// ```
pub fn conditional_estimates(
    stat: &SufficientStatistic,
    noise_prior: &NoisePriorParams,
    joint_prior: &JointPriorParams,
) -> Result<ConditionalEstimates, MomentError> {
    let d1 = joint_prior.alpha1() + stat.half_n() - 2.0;
    if d1 <= 0.0 {
        return Err(MomentError::DivergentMoment {
            shape: d1,
            alpha: joint_prior.alpha1(),
            n: stat.n(),
            order: 1,
        });
    }
    let d0 = noise_prior.alpha0() + stat.half_n() - 1.0;
    if d0 <= 0.0 {
        return Err(MomentError::DivergentMoment {
            shape: d0,
            alpha: noise_prior.alpha0(),
            n: stat.n(),
            order: 1,
        });
    }
    let scale1 = (joint_prior.beta1() + stat.t() / 2.0) / d1;
    Ok(ConditionalEstimates {
        s_h1: joint_prior.signal_fraction() * scale1,
        v_h1: joint_prior.noise_fraction() * scale1,
        v_h0: (noise_prior.beta0() + stat.t() / 2.0) / d0,
    })
}

/// First and second posterior power moments, used to assemble conditional
/// risks without exponentiating large log moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PosteriorMoments {
    /// `E[s | H1, y]`
    pub e_s: f64,
    /// `E[s² | H1, y]`
    pub e_s2: f64,
    /// `E[v | H1, y]`
    pub e_v: f64,
    /// `E[v² | H1, y]`
    pub e_v2: f64,
    /// `E[v | H0, y]`
    pub e_v_h0: f64,
    /// `E[v² | H0, y]`
    pub e_v2_h0: f64,
}

impl PosteriorMoments {
    /// Posterior variances, clamped against floating-point cancellation.
    pub fn var_s(&self) -> f64 {
        (self.e_s2 - self.e_s * self.e_s).max(0.0)
    }

    pub fn var_v(&self) -> f64 {
        (self.e_v2 - self.e_v * self.e_v).max(0.0)
    }

    pub fn var_v_h0(&self) -> f64 {
        (self.e_v2_h0 - self.e_v_h0 * self.e_v_h0).max(0.0)
    }
}

pub(crate) fn posterior_power_moments(
    stat: &SufficientStatistic,
    noise_prior: &NoisePriorParams,
    joint_prior: &JointPriorParams,
) -> Result<PosteriorMoments, MomentError> {
    let alpha1 = joint_prior.alpha1();
    let d1 = alpha1 + stat.half_n() - 2.0;
    let d1b = alpha1 + stat.half_n() - 3.0;
    if d1b <= 0.0 {
        return Err(MomentError::DivergentMoment {
            shape: d1b,
            alpha: alpha1,
            n: stat.n(),
            order: 2,
        });
    }
    let alpha0 = noise_prior.alpha0();
    let d0 = alpha0 + stat.half_n() - 1.0;
    let d0b = alpha0 + stat.half_n() - 2.0;
    if d0b <= 0.0 {
        return Err(MomentError::DivergentMoment {
            shape: d0b,
            alpha: alpha0,
            n: stat.n(),
            order: 2,
        });
    }

    let phi1 = joint_prior.phi1();
    let phi2 = joint_prior.phi2();
    let c11 = joint_prior.angular_norm();
    let c15 = angular_constant(1, 5, phi1, phi2)?;
    let c51 = angular_constant(5, 1, phi1, phi2)?;

    let scale1 = (joint_prior.beta1() + stat.t() / 2.0) / d1;
    let scale1_sq = scale1 * (joint_prior.beta1() + stat.t() / 2.0) / d1b;
    let scale0 = (noise_prior.beta0() + stat.t() / 2.0) / d0;
    let scale0_sq = scale0 * (noise_prior.beta0() + stat.t() / 2.0) / d0b;

    Ok(PosteriorMoments {
        e_s: joint_prior.signal_fraction() * scale1,
        e_s2: (c15 / c11) * scale1_sq,
        e_v: joint_prior.noise_fraction() * scale1,
        e_v2: (c51 / c11) * scale1_sq,
        e_v_h0: scale0,
        e_v2_h0: scale0_sq,
    })
}
