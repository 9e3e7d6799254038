//! Fits the tail-envelope constants to simulated tail frequencies on two
//! families and re-checks every cell against the fit.
//!
//!     cargo run --release --example calibrate_envelope -- [trials] [seed]

use collision::distribution::DistributionSpec;
use collision::harness::{run_calibration, CaseSpec, ExperimentConfig, ExperimentKind};

fn main() -> collision::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let trials = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5);
    let grid = vec![0.01, 0.02, 0.05, 0.1, 0.2];
    let cfg = ExperimentConfig {
        n: Some(1000),
        epsilons: grid.clone(),
        relative_epsilons: true,
        cases: vec![CaseSpec {
            distribution: DistributionSpec::Zipf { m: 500, s: 1.3 },
            n: 500,
            epsilons: grid,
            relative_epsilons: true,
        }],
        ..ExperimentConfig::new(ExperimentKind::Calibrate, DistributionSpec::Uniform { m: 200 }, trials, seed)
    };
    let report = run_calibration(&cfg)?;
    print!("{}", report.summary());
    Ok(())
}
