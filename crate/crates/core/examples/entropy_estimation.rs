//! Relative-error estimation of the collision probability, and the implied
//! Rényi-2 entropy, at the sample size chosen from a lower bound on Q.
//!
//!     cargo run --release --example entropy_estimation -- [epsilon] [seed]

use collision::defaults;
use collision::distribution::{sample_histogram, DistributionSpec, SampleSeed};
use collision::estimator::{entropy_estimate, entropy_sample_size, estimate_from_histogram};

fn main() -> collision::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let eps: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);

    for spec in [
        DistributionSpec::Uniform { m: 100 },
        DistributionSpec::Zipf { m: 1000, s: 1.5 },
        DistributionSpec::PlantedBias { m: 500, alpha: 0.4 },
    ] {
        let pmf = spec.build()?;
        let q = pmf.collision_probability();
        let n = entropy_sample_size(q, eps, 0.1, defaults::ENTROPY_C)?;
        let hist = sample_histogram(&pmf, n, SampleSeed::new(seed, 0))?;
        let est = estimate_from_histogram(&hist)?;
        let h = entropy_estimate(&hist, 2.0)?;
        println!(
            "{:<24} n={n:>6}  Q={q:.5}  q_hat={:.5}  rel.err={:+.4}  H2={h:.3} bits (true {:.3})",
            spec.label(),
            est.q_hat,
            est.q_hat / q - 1.0,
            -q.log2()
        );
    }
    Ok(())
}
