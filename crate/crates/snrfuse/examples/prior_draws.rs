//! Draw from both priors and compare sample statistics with the analytic
//! moments.
//!
//! Under `H0` the noise power is inverse-gamma `(α₀, β₀)`, so its mean is
//! `β₀/(α₀−1)`. Under `H1` the total power `t = s + v` is inverse-gamma
//! `(α₁−1, β₁)` (mean `β₁/(α₁−2)`), split by an independent angle, so the
//! mean signal fraction is `C₁₃/C₁₁`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use snrfuse::model::{
    angular_constant, sample_noise_power, sample_power_pair, JointPriorParams, NoisePriorParams,
};

fn main() {
    let noise = NoisePriorParams::new(3.0, 1.0).unwrap();
    let joint = JointPriorParams::new(3.0, 9.1, 0.0, PI / 8.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let draws = 200_000;

    let mut v_sum = 0.0;
    for _ in 0..draws {
        v_sum += sample_noise_power(&mut rng, &noise);
    }
    let v_mean = v_sum / draws as f64;
    let v_expect = noise.beta0() / (noise.alpha0() - 1.0);
    println!("H0 noise power:  sample mean {v_mean:.4}, analytic {v_expect:.4}");

    let mut t_sum = 0.0;
    let mut frac_sum = 0.0;
    for _ in 0..draws {
        let pair = sample_power_pair(&mut rng, &joint);
        t_sum += pair.total();
        frac_sum += pair.s() / pair.total();
    }
    let t_mean = t_sum / draws as f64;
    let t_expect = joint.beta1() / (joint.alpha1() - 2.0);
    let c11 = angular_constant(1, 1, joint.phi1(), joint.phi2()).unwrap();
    let c13 = angular_constant(1, 3, joint.phi1(), joint.phi2()).unwrap();
    let frac_expect = c13 / c11;
    println!("H1 total power:  sample mean {t_mean:.4}, analytic {t_expect:.4}");
    println!(
        "signal fraction: sample mean {:.4}, analytic {frac_expect:.4}",
        frac_sum / draws as f64
    );

    // loose 3-sigma-ish sanity bounds; the tight checks live in the tests
    assert!((v_mean - v_expect).abs() / v_expect < 0.05);
    assert!((t_mean - t_expect).abs() / t_expect < 0.10);
    assert!((frac_sum / draws as f64 - frac_expect).abs() < 0.01);
    println!("sample moments agree with the analytic values");
}
