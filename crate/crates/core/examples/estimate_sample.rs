//! Collision probability and Rényi-2 entropy of a sample, computed from both
//! the pairwise count and the histogram.
//!
//!     cargo run --example estimate_sample -- [words...]

use collision::estimator::{entropy_estimate, estimate_from_histogram, estimate_pairwise, SampleHistogram};

fn main() -> collision::Result<()> {
    let mut words: Vec<String> = std::env::args().skip(1).collect();
    if words.is_empty() {
        words = "the cat sat on the mat and the dog sat on the log".split(' ').map(String::from).collect();
    }
    let hist = SampleHistogram::from_symbols(&words)?;
    let fast = estimate_from_histogram(&hist)?;
    let slow = estimate_pairwise(&words)?;
    assert_eq!(fast.collision_pairs, slow.collision_pairs);

    println!("n = {}, distinct = {}", hist.n(), hist.support());
    println!("colliding ordered pairs = {}", fast.collision_pairs);
    println!("q_hat = {:.6}", fast.q_hat);
    match entropy_estimate(&hist, 2.0) {
        Ok(h) => println!("H2 = {h:.4} bits"),
        Err(e) => println!("H2 undefined: {e}"),
    }
    Ok(())
}
