//! Error rates of one tester run at the full sample budget against the
//! median of k runs on budget / k samples each.
//!
//!     cargo run --release --example boosting -- [k] [trials]

use collision::distribution::DistributionSpec;
use collision::harness::{run_boosting_comparison, ExperimentConfig, ExperimentKind};

fn main() -> collision::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let k = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let trials = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(400);
    let cfg = ExperimentConfig {
        epsilons: vec![0.5],
        boost_k: Some(k),
        ..ExperimentConfig::new(ExperimentKind::Boosting, DistributionSpec::Uniform { m: 1600 }, trials, 9)
    };
    print!("{}", run_boosting_comparison(&cfg)?.summary());
    Ok(())
}
