//! Monte Carlo tail frequencies of the estimator against the committed
//! envelope, with Wilson intervals.
//!
//!     cargo run --release --example tail_experiment -- [trials] [seed]

use collision::distribution::DistributionSpec;
use collision::harness::{run_tail_experiment, ExperimentConfig, ExperimentKind};

fn main() -> collision::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let trials = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5000);
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let cfg = ExperimentConfig {
        n: Some(1000),
        epsilons: vec![0.005, 0.01, 0.02, 0.05, 0.1],
        relative_epsilons: true,
        ..ExperimentConfig::new(ExperimentKind::Tail, DistributionSpec::Zipf { m: 300, s: 1.0 }, trials, seed)
    };
    let report = run_tail_experiment(&cfg)?;
    print!("{}", report.summary());
    Ok(())
}
