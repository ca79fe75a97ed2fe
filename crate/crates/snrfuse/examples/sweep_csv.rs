//! Sweep the noise-prior scale and print the comparison as CSV.
//!
//! `run_sweep` expands a parameter grid, derives a seed per grid point, and
//! runs the full experiment at each point; this is the library path behind
//! `snrfuse simulate --sweep`. Output goes to stdout in the same column
//! layout the CLI writes.

use std::f64::consts::PI;

use snrfuse::model::{CostParams, HypothesisPriors, JointPriorParams, NoisePriorParams};
use snrfuse::montecarlo::{run_sweep, ExperimentConfig, SweepSpec};
use snrfuse::Method;

fn main() {
    let base = ExperimentConfig::new(
        1000,
        64,
        HypothesisPriors::balanced(),
        CostParams::unit(),
        NoisePriorParams::new(3.0, 1.0).unwrap(),
        JointPriorParams::new(3.0, 9.1, 0.0, PI / 8.0).unwrap(),
    )
    .unwrap();
    let specs = [SweepSpec {
        name: "beta0".to_string(),
        values: vec![0.5, 1.0, 2.0, 4.0, 8.0],
    }];
    let methods = [Method::Joint, Method::Separate];

    let results = run_sweep(&base, &specs, 7, &methods).unwrap();

    println!("beta0,method,trials,detection_error,detection_error_se,bayes_risk,bayes_risk_se");
    for (point, summary) in &results {
        let beta0 = point.assignments[0].1;
        for metrics in &summary.methods {
            println!(
                "{beta0},{},{},{},{},{},{}",
                metrics.method,
                metrics.trials,
                metrics.detection_error.mean,
                metrics.detection_error.se,
                metrics.bayes_risk.mean,
                metrics.bayes_risk.se
            );
        }
    }
}
