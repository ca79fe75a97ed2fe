//! The angular layer of the signal-plus-noise prior.
//!
//! Polar coordinates `s = t cos²θ`, `v = t sin²θ` turn the power split into
//! an angle confined to a cone `[φ₁, φ₂]`. Every closed form in the crate
//! consumes the constants `C_mn = 2 ∫ sinᵐθ cosⁿθ dθ` over that cone; this
//! example prints them for a few cones and checks the exact split identity
//! `C₁₃ + C₃₁ = C₁₁` that makes the conditional estimates share one
//! normalizer.

use std::f64::consts::PI;

use snrfuse::model::angular_constant;
use snrfuse::oracle::{quad_angular_constant, QuadratureSettings};

fn main() {
    let settings = QuadratureSettings::default();
    let cones = [
        ("full quadrant", 0.0, PI / 2.0),
        ("signal-heavy", 0.0, PI / 8.0),
        ("balanced band", PI / 6.0, PI / 3.0),
        ("noise-heavy", 3.0 * PI / 8.0, PI / 2.0),
    ];

    println!(
        "{:<14} {:>10} {:>10} {:>10} {:>12} {:>12}",
        "cone", "C11", "C13", "C31", "split err", "quad err"
    );
    for (label, phi1, phi2) in cones {
        let c11 = angular_constant(1, 1, phi1, phi2).unwrap();
        let c13 = angular_constant(1, 3, phi1, phi2).unwrap();
        let c31 = angular_constant(3, 1, phi1, phi2).unwrap();
        let split_err = ((c13 + c31) - c11).abs();
        let quad = quad_angular_constant(1, 1, phi1, phi2, &settings).unwrap();
        let quad_err = (c11 - quad).abs() / c11;
        println!(
            "{label:<14} {c11:>10.6} {c13:>10.6} {c31:>10.6} {split_err:>12.2e} {quad_err:>12.2e}"
        );
        assert!(split_err < 1e-15 * c11.max(1.0));
    }

    // narrow cone near the axis: almost all power is signal
    let c11 = angular_constant(1, 1, 0.0, 0.05).unwrap();
    let c13 = angular_constant(1, 3, 0.0, 0.05).unwrap();
    println!(
        "\nmean signal fraction on [0, 0.05]: {:.6} (cone nearly on the signal axis)",
        c13 / c11
    );
}
