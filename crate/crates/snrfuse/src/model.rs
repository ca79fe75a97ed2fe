//! Domain types, prior densities, angular normalizing constants, and exact
//! samplers for the generative model.
//!
//! The observation model is an i.i.d. zero-mean Gaussian vector whose
//! variance is the noise power `v` under `H0` and the total power `s + v`
//! under `H1`. Both likelihoods depend on the data only through the sample
//! count `n` and the energy `t = Σ yᵢ²`, captured by [`SufficientStatistic`].
//!
//! Priors:
//!
//! - `H0`: `v ~ InvGamma(α₀, β₀)`.
//! - `H1`: the pair `(s, v)` lives on the cone `s = t·cos²θ`,
//!   `v = t·sin²θ` with `t > 0` and `θ ∈ [φ₁, φ₂] ⊆ [0, π/2]`. The total
//!   power `t` is `InvGamma(α₁ − 1, β₁)` and the angle has density
//!   `sin(2θ)/C₁₁`, which multiplied out gives the conjugate joint density
//!   `∝ (s+v)^{-(α₁+1)} exp(-β₁/(s+v))` of [`joint_prior_logpdf`].
//!
//! The support constants `C_mn = ∫ 2 sin^m θ cos^n θ dθ` are evaluated
//! exactly for odd exponents by [`angular_constant`]; they control how much
//! prior mass the `H1` prior puts on signal-dominant versus noise-dominant
//! power splits.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_distr::{Distribution, Gamma, OpenClosed01};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

/// Construction and domain errors for the model types.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("signal power must be nonnegative and finite, got {value}")]
    NegativeSignalPower { value: f64 },
    #[error("alpha1 must exceed 1, got {value}")]
    Alpha1TooSmall { value: f64 },
    #[error("detection cost {name} must be nonnegative and finite, got {value}")]
    NegativeCost { name: &'static str, value: f64 },
    #[error("hypothesis priors must be nonnegative and sum to 1, got pi0={pi0}, pi1={pi1}")]
    InvalidHypothesisPriors { pi0: f64, pi1: f64 },
    #[error("angular support must satisfy 0 <= phi1 < phi2 <= pi/2, got [{phi1}, {phi2}]")]
    InvalidSupport { phi1: f64, phi2: f64 },
    #[error("angular exponents must be odd positive integers, got m={m}, n={n}")]
    EvenExponent { m: u32, n: u32 },
    #[error("inverse-gamma density is undefined at v={value}; v must be positive")]
    DomainError { value: f64 },
    #[error("empty observation sequence")]
    EmptyObservations,
    #[error("non-finite observation at index {index}")]
    NonFiniteObservation { index: usize },
    #[error("observation energy overflowed f64")]
    EnergyOverflow,
    #[error("energy must be nonnegative and finite, got {value}")]
    InvalidEnergy { value: f64 },
}

fn require_positive(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ModelError::NonPositive { name, value })
    }
}

/// Prior probabilities `π₀ = P(H0)` and `π₁ = P(H1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisPriors {
    pi0: f64,
    pi1: f64,
}

impl HypothesisPriors {
    /// Tolerance on `π₀ + π₁ = 1`.
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(pi0: f64, pi1: f64) -> Result<Self, ModelError> {
        let ok = pi0.is_finite()
            && pi1.is_finite()
            && pi0 >= 0.0
            && pi1 >= 0.0
            && (pi0 + pi1 - 1.0).abs() <= Self::SUM_TOL;
        if ok {
            Ok(Self { pi0, pi1 })
        } else {
            Err(ModelError::InvalidHypothesisPriors { pi0, pi1 })
        }
    }

    /// Equally likely hypotheses.
    pub fn balanced() -> Self {
        Self { pi0: 0.5, pi1: 0.5 }
    }

    pub fn pi0(&self) -> f64 {
        self.pi0
    }

    pub fn pi1(&self) -> f64 {
        self.pi1
    }
}

/// Shape/scale parameters of the inverse-gamma noise-power prior under `H0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisePriorParams {
    alpha0: f64,
    beta0: f64,
}

impl NoisePriorParams {
    pub fn new(alpha0: f64, beta0: f64) -> Result<Self, ModelError> {
        Ok(Self {
            alpha0: require_positive("alpha0", alpha0)?,
            beta0: require_positive("beta0", beta0)?,
        })
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }
}

/// Parameters of the conjugate `H1` prior on `(s, v)`: inverse-gamma shape
/// and scale for the total power plus the angular support `[φ₁, φ₂]`.
///
/// A narrow support near `θ = 0` concentrates the prior on
/// signal-dominant splits (`v ≪ s`); the full quadrant `[0, π/2]` is
/// symmetric in `s` and `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointPriorParams {
    alpha1: f64,
    beta1: f64,
    phi1: f64,
    phi2: f64,
}

impl JointPriorParams {
    pub fn new(alpha1: f64, beta1: f64, phi1: f64, phi2: f64) -> Result<Self, ModelError> {
        if !(alpha1.is_finite() && alpha1 > 1.0) {
            return Err(ModelError::Alpha1TooSmall { value: alpha1 });
        }
        let beta1 = require_positive("beta1", beta1)?;
        check_support(phi1, phi2)?;
        Ok(Self {
            alpha1,
            beta1,
            phi1,
            phi2,
        })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn phi1(&self) -> f64 {
        self.phi1
    }

    pub fn phi2(&self) -> f64 {
        self.phi2
    }

    /// `C₁₁ = sin²φ₂ − sin²φ₁`, the normalizer of the angular density.
    pub fn angular_norm(&self) -> f64 {
        sin_sq(self.phi2) - sin_sq(self.phi1)
    }

    /// Fraction `C₁₃/C₁₁` of the total power assigned to the signal by the
    /// angular prior, i.e. the prior mean of `cos²θ`.
    pub fn signal_fraction(&self) -> f64 {
        let c11 = angular_constant(1, 1, self.phi1, self.phi2).expect("validated support");
        let c13 = angular_constant(1, 3, self.phi1, self.phi2).expect("validated support");
        c13 / c11
    }

    /// Prior mean of `sin²θ`, the noise share of the total power.
    pub fn noise_fraction(&self) -> f64 {
        let c11 = angular_constant(1, 1, self.phi1, self.phi2).expect("validated support");
        let c31 = angular_constant(3, 1, self.phi1, self.phi2).expect("validated support");
        c31 / c11
    }
}

/// Quadratic cost model: detection costs `a_ij` and estimation-to-detection
/// conversion weights `b_ij` for true hypothesis `i` and decision `j`.
///
/// The realized cost of deciding `γ_j` under `H_i` is
/// `b_ij·[(s − ŝ)² + (v − v̂)²] + a_ij`, with `s = 0` under `H0` and
/// `ŝ = 0` whenever the decision is `γ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    a00: f64,
    a01: f64,
    a10: f64,
    a11: f64,
    b00: f64,
    b01: f64,
    b10: f64,
    b11: f64,
}

impl CostParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a00: f64,
        a01: f64,
        a10: f64,
        a11: f64,
        b00: f64,
        b01: f64,
        b10: f64,
        b11: f64,
    ) -> Result<Self, ModelError> {
        for (name, value) in [("a00", a00), ("a01", a01), ("a10", a10), ("a11", a11)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ModelError::NegativeCost { name, value });
            }
        }
        for (name, value) in [("b00", b00), ("b01", b01), ("b10", b10), ("b11", b11)] {
            require_positive(name, value)?;
        }
        Ok(Self {
            a00,
            a01,
            a10,
            a11,
            b00,
            b01,
            b10,
            b11,
        })
    }

    /// Unit conversion weights, unit cost for each wrong decision, zero cost
    /// for correct ones. Satisfies the compact detector's cost condition.
    pub fn unit() -> Self {
        Self {
            a00: 0.0,
            a01: 1.0,
            a10: 1.0,
            a11: 0.0,
            b00: 1.0,
            b01: 1.0,
            b10: 1.0,
            b11: 1.0,
        }
    }

    pub fn a00(&self) -> f64 {
        self.a00
    }
    pub fn a01(&self) -> f64 {
        self.a01
    }
    pub fn a10(&self) -> f64 {
        self.a10
    }
    pub fn a11(&self) -> f64 {
        self.a11
    }
    pub fn b00(&self) -> f64 {
        self.b00
    }
    pub fn b01(&self) -> f64 {
        self.b01
    }
    pub fn b10(&self) -> f64 {
        self.b10
    }
    pub fn b11(&self) -> f64 {
        self.b11
    }
}

/// Sample count and energy `t = Σ yᵢ²` of an observation vector.
///
/// Both Gaussian likelihoods depend on the data only through `(n, t)`, so
/// every detector and estimator in this crate takes a `SufficientStatistic`
/// rather than the raw samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientStatistic {
    n: usize,
    t: f64,
}

impl SufficientStatistic {
    pub fn new(n: usize, t: f64) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::EmptyObservations);
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(ModelError::InvalidEnergy { value: t });
        }
        Ok(Self { n, t })
    }

    /// Accumulates `(n, Σ yᵢ²)` from raw samples.
    ///
    /// The squares are sorted before a compensated summation, so the result
    /// is bit-identical under any permutation or sign flip of the input.
    pub fn from_samples(samples: &[f64]) -> Result<Self, ModelError> {
        if samples.is_empty() {
            return Err(ModelError::EmptyObservations);
        }
        for (index, y) in samples.iter().enumerate() {
            if !y.is_finite() {
                return Err(ModelError::NonFiniteObservation { index });
            }
        }
        let mut squares: Vec<f64> = samples.iter().map(|y| y * y).collect();
        squares.sort_unstable_by(f64::total_cmp);
        let mut sum = 0.0;
        let mut comp = 0.0;
        for x in squares {
            let next = sum + x;
            if sum.abs() >= x.abs() {
                comp += (sum - next) + x;
            } else {
                comp += (x - next) + sum;
            }
            sum = next;
        }
        let t = sum + comp;
        if !t.is_finite() {
            return Err(ModelError::EnergyOverflow);
        }
        Ok(Self {
            n: samples.len(),
            t,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sample count as a float, for the `n/2` shape shifts.
    pub fn half_n(&self) -> f64 {
        self.n as f64 / 2.0
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// A signal/noise power pair drawn from the `H1` prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPair {
    s: f64,
    v: f64,
}

impl PowerPair {
    pub fn new(s: f64, v: f64) -> Result<Self, ModelError> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(ModelError::NegativeSignalPower { value: s });
        }
        require_positive("v", v)?;
        Ok(Self { s, v })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn total(&self) -> f64 {
        self.s + self.v
    }
}

fn check_support(phi1: f64, phi2: f64) -> Result<(), ModelError> {
    if phi1.is_finite() && phi2.is_finite() && 0.0 <= phi1 && phi1 < phi2 && phi2 <= FRAC_PI_2 {
        Ok(())
    } else {
        Err(ModelError::InvalidSupport { phi1, phi2 })
    }
}

fn sin_sq(phi: f64) -> f64 {
    let s = phi.sin();
    s * s
}

/// Exact angular normalizing constant
/// `C_mn = ∫_{φ₁}^{φ₂} 2 sin^m θ cos^n θ dθ` for odd `m`, `n`.
///
/// The substitution `u = sin²θ` turns the integrand into the polynomial
/// `u^{(m−1)/2} (1−u)^{(n−1)/2}`, integrated termwise over
/// `[sin²φ₁, sin²φ₂]`. Supports inside the first quadrant keep the
/// integrand nonnegative, so no absolute values are needed. Even exponents
/// are rejected; the quadrature oracle handles those.
pub fn angular_constant(m: u32, n: u32, phi1: f64, phi2: f64) -> Result<f64, ModelError> {
    if m % 2 == 0 || n % 2 == 0 {
        return Err(ModelError::EvenExponent { m, n });
    }
    check_support(phi1, phi2)?;
    let a = (m - 1) / 2;
    let b = (n - 1) / 2;
    let u1 = sin_sq(phi1);
    let u2 = sin_sq(phi2);
    // ∫ u^a (1-u)^b du expanded binomially; exact for the small exponents
    // that arise from the moment formulas.
    let mut total = 0.0;
    let mut binom = 1.0f64;
    for k in 0..=b {
        let power = a + k + 1;
        let term = (u2.powi(power as i32) - u1.powi(power as i32)) / f64::from(power);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * binom * term;
        binom = binom * f64::from(b - k) / f64::from(k + 1);
    }
    Ok(total)
}

/// Log-density of `InvGamma(α, β)` at `v`:
/// `α·ln β − ln Γ(α) − (α+1)·ln v − β/v`.
pub fn inv_gamma_logpdf(v: f64, alpha: f64, beta: f64) -> Result<f64, ModelError> {
    if !(v.is_finite() && v > 0.0) {
        return Err(ModelError::DomainError { value: v });
    }
    Ok(alpha * beta.ln() - ln_gamma(alpha) - (alpha + 1.0) * v.ln() - beta / v)
}

/// Log-density of the conjugate `H1` prior at `(s, v)`.
///
/// Inside the support cone the value is
/// `(α₁−1)·ln β₁ − ln C₁₁ − ln Γ(α₁−1) − (α₁+1)·ln(s+v) − β₁/(s+v)`;
/// outside it the function returns `-∞`. The density depends on `(s, v)`
/// only through the total `s + v`, with the cone membership decided by
/// `θ = arcsin(√(v/(s+v)))`.
pub fn joint_prior_logpdf(s: f64, v: f64, params: &JointPriorParams) -> f64 {
    let total = s + v;
    if !(s >= 0.0 && v >= 0.0 && total > 0.0 && total.is_finite()) {
        return f64::NEG_INFINITY;
    }
    let theta = (v / total).sqrt().asin();
    if theta < params.phi1 || theta > params.phi2 {
        return f64::NEG_INFINITY;
    }
    let a1 = params.alpha1;
    (a1 - 1.0) * params.beta1.ln() - params.angular_norm().ln() - ln_gamma(a1 - 1.0)
        - (a1 + 1.0) * total.ln()
        - params.beta1 / total
}

/// Draws one noise power from `InvGamma(α₀, β₀)` as `β₀ / G` with
/// `G ~ Gamma(α₀, 1)`.
pub fn sample_noise_power<R: Rng + ?Sized>(rng: &mut R, params: &NoisePriorParams) -> f64 {
    let gamma = Gamma::new(params.alpha0, 1.0).expect("shape validated at construction");
    params.beta0 / gamma.sample(rng)
}

/// Inverse CDF of the angular density `sin(2θ)/C₁₁` on `[φ₁, φ₂]`:
/// `θ(u) = arcsin(√(sin²φ₁ + u·C₁₁))` for `u ∈ [0, 1]`.
pub fn angle_from_uniform(u: f64, params: &JointPriorParams) -> f64 {
    let q = sin_sq(params.phi1) + u * params.angular_norm();
    q.min(1.0).sqrt().asin()
}

/// Draws one `(s, v)` pair from the `H1` prior: total power
/// `t ~ InvGamma(α₁−1, β₁)` and angle by the exact inverse CDF of
/// `sin(2θ)/C₁₁`, combined as `s = t·cos²θ`, `v = t·sin²θ`.
pub fn sample_power_pair<R: Rng + ?Sized>(rng: &mut R, params: &JointPriorParams) -> PowerPair {
    let gamma = Gamma::new(params.alpha1 - 1.0, 1.0).expect("shape validated at construction");
    let t = params.beta1 / gamma.sample(rng);
    // u on (0, 1] keeps the drawn noise share strictly positive even when
    // phi1 = 0.
    let u: f64 = OpenClosed01.sample(rng);
    let noise_share = sin_sq(params.phi1) + u * params.angular_norm();
    let v = t * noise_share;
    let s = (t * (1.0 - noise_share)).max(0.0);
    PowerPair::new(s, v).expect("cone coordinates give valid powers")
}
