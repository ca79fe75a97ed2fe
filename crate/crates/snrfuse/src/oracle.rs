//! Brute-force numerical integration used to validate the closed-form
//! moments, priors, and conditional risks. Never called in the hot path.
//!
//! All integrals are evaluated by adaptive Gauss–Kronrod (G7, K15)
//! quadrature with worst-interval-first bisection. Half-line integrals are
//! mapped to `(0, 1)` by `x = B·w/(1 − w)` with `B` chosen near the
//! integrand's scale; the integrand itself is assembled in log domain and
//! exponentiated relative to a probed peak value, so the quadrature only
//! ever sees well-scaled numbers. Joint-prior integrals run in `(t, θ)`
//! coordinates where the support cone becomes a rectangle and the area
//! element `2t·sinθ·cosθ` is folded in analytically.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::model::{
    angular_constant, inv_gamma_logpdf, JointPriorParams, ModelError, NoisePriorParams,
    SufficientStatistic,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid quadrature settings: {reason}")]
    BadSettings { reason: String },
    #[error(
        "quadrature failed to converge: error estimate {error_estimate:e} on value {value:e} \
         after {subdivisions} subdivisions"
    )]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Tolerances and the subdivision budget for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
}

impl QuadratureSettings {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self, OracleError> {
        if !(rel_tol.is_finite() && rel_tol > 0.0) || !(abs_tol.is_finite() && abs_tol > 0.0) {
            return Err(OracleError::BadSettings {
                reason: format!("tolerances must be positive, got rel={rel_tol}, abs={abs_tol}"),
            });
        }
        if max_subdivisions < 10 {
            return Err(OracleError::BadSettings {
                reason: format!("max_subdivisions must be at least 10, got {max_subdivisions}"),
            });
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn max_subdivisions(&self) -> usize {
        self.max_subdivisions
    }

    pub fn with_max_subdivisions(mut self, max_subdivisions: usize) -> Self {
        self.max_subdivisions = max_subdivisions.max(10);
        self
    }
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-280,
            max_subdivisions: 400,
        }
    }
}

// 15-point Kronrod extension of 7-point Gauss (QUADPACK qk15 abscissae).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_2,
    0.949_107_912_342_758_524_5,
    0.864_864_423_359_769_072_8,
    0.741_531_185_599_394_439_9,
    0.586_087_235_467_691_130_3,
    0.405_845_151_377_397_166_9,
    0.207_784_955_007_898_467_6,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_96,
    0.063_092_092_629_978_553_29,
    0.104_790_010_322_250_183_8,
    0.140_653_259_715_525_918_7,
    0.169_004_726_639_267_902_8,
    0.190_350_578_064_785_409_9,
    0.204_432_940_075_298_892_4,
    0.209_482_141_084_727_828_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_3,
    0.279_705_391_489_276_667_9,
    0.381_830_050_505_118_945_0,
    0.417_959_183_673_469_387_8,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut result_kronrod = WGK[7] * fc;
    let mut result_gauss = WG[3] * fc;
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate().take(7) {
        let dx = half * x;
        let f_lo = f(center - dx);
        let f_hi = f(center + dx);
        result_kronrod += wk * (f_lo + f_hi);
        if j % 2 == 1 {
            result_gauss += WG[j / 2] * (f_lo + f_hi);
        }
    }
    Segment {
        lo,
        hi,
        value: result_kronrod * half,
        error: ((result_kronrod - result_gauss) * half).abs(),
    }
}

/// Adaptive integration of `f` over `[lo, hi]`, bisecting the interval with
/// the largest Gauss/Kronrod discrepancy until the summed error estimate
/// meets the tolerance.
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    let mut heap = BinaryHeap::new();
    let first = kronrod15(f, lo, hi);
    let mut total_value = first.value;
    let mut total_error = first.error;
    heap.push(first);

    let mut subdivisions = 0usize;
    while total_error > settings.abs_tol.max(settings.rel_tol * total_value.abs()) {
        if subdivisions >= settings.max_subdivisions {
            return Err(OracleError::NonConvergence {
                value: final_sum(heap),
                error_estimate: total_error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // interval is at floating-point resolution, cannot refine
            return Err(OracleError::NonConvergence {
                value: {
                    heap.push(worst);
                    final_sum(heap)
                },
                error_estimate: total_error,
                subdivisions,
            });
        }
        let left = kronrod15(f, worst.lo, mid);
        let right = kronrod15(f, mid, worst.hi);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
    Ok(final_sum(heap))
}

// Re-sum the converged segments left-to-right with compensation; the running
// totals in the adaptive loop accumulate update noise.
fn final_sum(heap: BinaryHeap<Segment>) -> f64 {
    let mut segments = heap.into_vec();
    segments.sort_unstable_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut sum = 0.0;
    let mut comp = 0.0;
    for seg in segments {
        let x = seg.value;
        let next = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - next) + x;
        } else {
            comp += (x - next) + sum;
        }
        sum = next;
    }
    sum + comp
}

const PROBE_OUTER: usize = 512;
const PROBE_INNER: usize = 9;

/// `∫₀^∞ linear(x)·exp(log_part(x)) dx` computed through the transform
/// `x = scale·w/(1 − w)` with peak-relative exponentiation. Returns the log
/// of the integral.
fn half_line_log_integral(
    scale: f64,
    log_part: &dyn Fn(f64) -> f64,
    linear_part: &dyn Fn(f64) -> f64,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    let x_of = |w: f64| scale * w / (1.0 - w);
    let log_jacobian = |w: f64| scale.ln() - 2.0 * (1.0 - w).ln();

    let mut peak = f64::NEG_INFINITY;
    for i in 1..=PROBE_OUTER {
        let w = i as f64 / (PROBE_OUTER + 1) as f64;
        let value = log_part(x_of(w)) + log_jacobian(w);
        if value.is_finite() && value > peak {
            peak = value;
        }
    }
    if peak == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }

    let integrand = |w: f64| {
        if w <= 0.0 || w >= 1.0 {
            return 0.0;
        }
        let x = x_of(w);
        let exponent = log_part(x) + log_jacobian(w) - peak;
        if exponent == f64::NEG_INFINITY {
            return 0.0;
        }
        linear_part(x) * exponent.exp()
    };
    let total = adaptive(&integrand, 0.0, 1.0, settings)?;
    Ok(peak + total.ln())
}

/// Nested version of [`half_line_log_integral`] for joint-prior integrals:
/// outer variable is the total power `t ∈ (0, ∞)`, inner is the angle
/// `θ ∈ [θ_lo, θ_hi]`.
fn nested_log_integral(
    scale: f64,
    theta_lo: f64,
    theta_hi: f64,
    log_part: &dyn Fn(f64, f64) -> f64,
    linear_part: &dyn Fn(f64, f64) -> f64,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    let t_of = |w: f64| scale * w / (1.0 - w);
    let log_jacobian = |w: f64| scale.ln() - 2.0 * (1.0 - w).ln();

    let mut peak = f64::NEG_INFINITY;
    for i in 1..=PROBE_OUTER {
        let w = i as f64 / (PROBE_OUTER + 1) as f64;
        let t = t_of(w);
        for j in 1..=PROBE_INNER {
            let theta =
                theta_lo + (theta_hi - theta_lo) * j as f64 / (PROBE_INNER + 1) as f64;
            let value = log_part(t, theta) + log_jacobian(w);
            if value.is_finite() && value > peak {
                peak = value;
            }
        }
    }
    if peak == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }

    let inner_settings = QuadratureSettings {
        rel_tol: settings.rel_tol * 0.1,
        abs_tol: settings.abs_tol,
        max_subdivisions: settings.max_subdivisions,
    };
    let outer = |w: f64| -> Result<f64, OracleError> {
        if w <= 0.0 || w >= 1.0 {
            return Ok(0.0);
        }
        let t = t_of(w);
        let shift = peak - log_jacobian(w);
        let inner = |theta: f64| {
            let exponent = log_part(t, theta) - shift;
            if exponent == f64::NEG_INFINITY {
                return 0.0;
            }
            linear_part(t, theta) * exponent.exp()
        };
        adaptive(&inner, theta_lo, theta_hi, &inner_settings)
    };

    // The adaptive driver works on plain f64 closures; carry inner failures
    // out through a capture instead of threading Results through it.
    let failure = std::cell::RefCell::new(None);
    let outer_plain = |w: f64| match outer(w) {
        Ok(value) => value,
        Err(err) => {
            *failure.borrow_mut() = Some(err);
            0.0
        }
    };
    let total = adaptive(&outer_plain, 0.0, 1.0, settings)?;
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    Ok(peak + total.ln())
}

fn log_likelihood_factor(variance: f64, stat: &SufficientStatistic) -> f64 {
    -stat.half_n() * (2.0 * PI * variance).ln() - stat.t() / (2.0 * variance)
}

// Joint prior density at total power t times the (t, θ) area element
// 2t·sinθ·cosθ, assembled directly in the rectangle coordinates so no
// support test is needed at quadrature nodes.
fn log_joint_density_area(t: f64, theta: f64, prior: &JointPriorParams, log_c11: f64) -> f64 {
    let alpha1 = prior.alpha1();
    (alpha1 - 1.0) * prior.beta1().ln() - log_c11 - ln_gamma(alpha1 - 1.0)
        - (alpha1 + 1.0) * t.ln()
        - prior.beta1() / t
        + (2.0 * t * theta.sin() * theta.cos()).ln()
}

/// Quadrature of `⟨v^q f₀(y|v)⟩_V = ∫ v^q f₀(y|v) p_V(v) dv`.
pub fn quad_moment_h0(
    q: u32,
    stat: &SufficientStatistic,
    prior: &NoisePriorParams,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    quad_log_moment_h0(q, stat, prior, settings).map(f64::exp)
}

/// Log-domain variant of [`quad_moment_h0`].
pub fn quad_log_moment_h0(
    q: u32,
    stat: &SufficientStatistic,
    prior: &NoisePriorParams,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    let scale = prior.beta0() + stat.t() / 2.0;
    let log_part = |v: f64| {
        let prior_part = match inv_gamma_logpdf(v, prior.alpha0(), prior.beta0()) {
            Ok(value) => value,
            Err(_) => return f64::NEG_INFINITY,
        };
        q as f64 * v.ln() + log_likelihood_factor(v, stat) + prior_part
    };
    half_line_log_integral(scale, &log_part, &|_| 1.0, settings)
}

/// Quadrature of `⟨s^p v^q f₁(y|s,v)⟩_{S,V}` over the prior's support cone,
/// in `(t, θ)` coordinates.
pub fn quad_moment_h1(
    p: u32,
    q: u32,
    stat: &SufficientStatistic,
    prior: &JointPriorParams,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    quad_log_moment_h1(p, q, stat, prior, settings).map(f64::exp)
}

/// Log-domain variant of [`quad_moment_h1`].
pub fn quad_log_moment_h1(
    p: u32,
    q: u32,
    stat: &SufficientStatistic,
    prior: &JointPriorParams,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    let log_c11 = angular_constant(1, 1, prior.phi1(), prior.phi2())?.ln();
    let scale = prior.beta1() + stat.t() / 2.0;
    let log_part = |t: f64, theta: f64| {
        let mut acc = log_joint_density_area(t, theta, prior, log_c11)
            + log_likelihood_factor(t, stat);
        if p > 0 {
            let cos = theta.cos();
            acc += p as f64 * (t * cos * cos).ln();
        }
        if q > 0 {
            let sin = theta.sin();
            acc += q as f64 * (t * sin * sin).ln();
        }
        acc
    };
    nested_log_integral(
        scale,
        prior.phi1(),
        prior.phi2(),
        &log_part,
        &|_, _| 1.0,
        settings,
    )
}

/// Total mass of the inverse-gamma noise prior; 1 for a correct density.
pub fn noise_prior_mass(
    prior: &NoisePriorParams,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    let log_part = |v: f64| {
        inv_gamma_logpdf(v, prior.alpha0(), prior.beta0()).unwrap_or(f64::NEG_INFINITY)
    };
    half_line_log_integral(prior.beta0(), &log_part, &|_| 1.0, settings).map(f64::exp)
}

/// Total mass of the joint signal/noise prior over its support cone.
pub fn joint_prior_mass(
    prior: &JointPriorParams,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    let log_c11 = angular_constant(1, 1, prior.phi1(), prior.phi2())?.ln();
    let log_part = |t: f64, theta: f64| log_joint_density_area(t, theta, prior, log_c11);
    nested_log_integral(
        prior.beta1(),
        prior.phi1(),
        prior.phi2(),
        &log_part,
        &|_, _| 1.0,
        settings,
    )
    .map(f64::exp)
}

/// Quadrature of the angular-constant integrand `2|sin^m θ cos^n θ|`.
///
/// Unlike [`angular_constant`] this path accepts even exponents.
pub fn quad_angular_constant(
    m: u32,
    n: u32,
    phi1: f64,
    phi2: f64,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    if !(phi1.is_finite() && phi2.is_finite() && phi1 < phi2) {
        return Err(OracleError::Model(ModelError::InvalidSupport { phi1, phi2 }));
    }
    let integrand = |theta: f64| {
        2.0 * theta.sin().powi(m as i32).abs() * theta.cos().powi(n as i32).abs()
    };
    adaptive(&integrand, phi1, phi2, settings)
}

/// Quadrature of the `H1` conditional-risk integrand
/// `∫∫ (b·[(s−ŝ)² + (v−v̂)²] + a)·f₁(y|s,v)·p_{S,V}(s,v) ds dv`.
///
/// `s_hat = 0` gives the cost cell of a missed detection.
pub fn quad_risk_h1(
    b: f64,
    a: f64,
    s_hat: f64,
    v_hat: f64,
    stat: &SufficientStatistic,
    prior: &JointPriorParams,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    let log_c11 = angular_constant(1, 1, prior.phi1(), prior.phi2())?.ln();
    let log_part = |t: f64, theta: f64| {
        log_joint_density_area(t, theta, prior, log_c11) + log_likelihood_factor(t, stat)
    };
    let linear_part = |t: f64, theta: f64| {
        let sin = theta.sin();
        let v = t * sin * sin;
        let s = t - v;
        let ds = s - s_hat;
        let dv = v - v_hat;
        b * (ds * ds + dv * dv) + a
    };
    nested_log_integral(
        prior.beta1() + stat.t() / 2.0,
        prior.phi1(),
        prior.phi2(),
        &log_part,
        &linear_part,
        settings,
    )
    .map(f64::exp)
}

/// Quadrature of the `H0` conditional-risk integrand
/// `∫ (b·[ŝ² + (v−v̂)²] + a)·f₀(y|v)·p_V(v) dv`.
pub fn quad_risk_h0(
    b: f64,
    a: f64,
    s_hat: f64,
    v_hat: f64,
    stat: &SufficientStatistic,
    prior: &NoisePriorParams,
    settings: &QuadratureSettings,
) -> Result<f64, OracleError> {
    let log_part = |v: f64| {
        let prior_part = match inv_gamma_logpdf(v, prior.alpha0(), prior.beta0()) {
            Ok(value) => value,
            Err(_) => return f64::NEG_INFINITY,
        };
        log_likelihood_factor(v, stat) + prior_part
    };
    let linear_part = |v: f64| {
        let dv = v - v_hat;
        b * (s_hat * s_hat + dv * dv) + a
    };
    half_line_log_integral(prior.beta0() + stat.t() / 2.0, &log_part, &linear_part, settings)
        .map(f64::exp)
}
