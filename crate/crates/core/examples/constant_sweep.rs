//! Sweeps the sample-size constants of the tester and of relative-error
//! estimation, printing the upper Wilson bound of each error rate.
//!
//!     cargo run --release --example constant_sweep -- [trials] [seed]

use collision::distribution::DistributionSpec;
use collision::harness::{run_entropy_experiment, run_tester_experiment, ExperimentConfig, ExperimentKind};

fn main() -> collision::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let trials = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(400);
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2024);

    println!("tester: m=2500 eps=0.5 delta=0.1, {trials} trials");
    println!("{:>6} {:>7} {:>10} {:>10}", "C", "n", "a_hi", "b_hi");
    for c in [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0] {
        let cfg = ExperimentConfig {
            epsilons: vec![0.5],
            constant: Some(c),
            ..ExperimentConfig::new(ExperimentKind::Tester, DistributionSpec::Uniform { m: 2500 }, trials, seed)
        };
        let r = run_tester_experiment(&cfg)?;
        println!(
            "{c:>6} {:>7} {:>10.4} {:>10.4}",
            r.rows[0].n,
            r.rows[0].wilson_hi.unwrap(),
            r.rows[1].wilson_hi.unwrap()
        );
    }

    println!("\nentropy: eps=0.2 delta=0.1, {trials} trials");
    println!("{:>6} {:<18} {:>7} {:>10}", "C", "family", "n", "hi");
    for c in [1.0, 2.0, 3.0, 4.0, 6.0, 8.0] {
        for dist in [DistributionSpec::Uniform { m: 100 }, DistributionSpec::Zipf { m: 1000, s: 1.5 }] {
            let cfg = ExperimentConfig {
                epsilons: vec![0.2],
                constant: Some(c),
                ..ExperimentConfig::new(ExperimentKind::Entropy, dist.clone(), trials, seed)
            };
            let r = run_entropy_experiment(&cfg)?;
            println!("{c:>6} {:<18} {:>7} {:>10.4}", dist.label(), r.rows[0].n, r.rows[0].wilson_hi.unwrap());
        }
    }
    Ok(())
}
