//! Cross-check the closed-form prior-weighted moments against the
//! adaptive-quadrature oracle at one observation.
//!
//! This is the library-level core of the `validate` subcommand: the same
//! quantity computed twice, once through gamma-function algebra and once by
//! brute-force integration, must agree to near machine precision.

use std::f64::consts::PI;

use snrfuse::model::{JointPriorParams, NoisePriorParams, SufficientStatistic};
use snrfuse::moments::{conditional_estimates, log_moment_h0, log_moment_h1};
use snrfuse::oracle::{quad_log_moment_h0, quad_log_moment_h1, QuadratureSettings};

fn main() {
    let noise = NoisePriorParams::new(3.0, 2.0).unwrap();
    let joint = JointPriorParams::new(3.0, 9.1, 0.0, PI / 8.0).unwrap();
    let settings = QuadratureSettings::default();
    let stat = SufficientStatistic::new(8, 12.5).unwrap();

    println!("n = {}, t = {}", stat.n(), stat.t());
    println!("{:<22} {:>18} {:>18} {:>10}", "moment", "closed form", "oracle", "rel err");

    for q in 0..=2u32 {
        let closed = log_moment_h0(q, &stat, &noise).unwrap();
        let quad = quad_log_moment_h0(q, &stat, &noise, &settings).unwrap();
        report(&format!("<v^{q} f0>"), closed, quad);
    }
    for (p, q) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
        let closed = log_moment_h1(p, q, &stat, &joint).unwrap();
        let quad = quad_log_moment_h1(p, q, &stat, &joint, &settings).unwrap();
        report(&format!("<s^{p} v^{q} f1>"), closed, quad);
    }

    let est = conditional_estimates(&stat, &noise, &joint).unwrap();
    println!("\nconditional estimates from the same moments:");
    println!("  s_hat under H1: {:.6}", est.s_h1);
    println!("  v_hat under H1: {:.6}", est.v_h1);
    println!("  v_hat under H0: {:.6}", est.v_h0);
}

/// Both sides are logs; the moment-domain relative error is `|e^Δ − 1|`.
fn report(name: &str, closed_log: f64, quad_log: f64) {
    let rel = ((closed_log - quad_log).exp() - 1.0).abs();
    println!("{name:<22} {closed_log:>18.12} {quad_log:>18.12} {rel:>10.2e}");
    assert!(rel < 1e-8, "{name} disagrees with the oracle");
}
