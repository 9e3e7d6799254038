//! Runs the collision tester on uniform and on planted-bias samples drawn at
//! the tester's sample size.
//!
//!     cargo run --example uniformity_tester -- [m] [epsilon] [seed]

use collision::defaults;
use collision::distribution::{planted_bias, sample_histogram, uniform, SampleSeed};
use collision::estimator::{tester_sample_size, uniformity_test};

fn main() -> collision::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let m: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let eps: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(7);

    let n = tester_sample_size(m, eps, 0.1, defaults::TESTER_C)?;
    println!("m = {m}, eps = {eps}, n = {n}, threshold = {:.3e}", (1.0 + eps) / m as f64);
    let cases = [
        ("uniform", uniform(m)?),
        ("planted_bias(alpha = 2 eps)", planted_bias(m, (2.0 * eps).min(1.0))?),
    ];
    for (name, pmf) in cases {
        println!("{name}: true Q = {:.3e}", pmf.collision_probability());
        for trial in 0..5 {
            let hist = sample_histogram(&pmf, n, SampleSeed::new(seed, trial))?;
            let v = uniformity_test(&hist, m, eps)?;
            println!("  trial {trial}: q_hat = {:.3e} -> {}", v.q_hat, v.decision);
        }
    }
    Ok(())
}
