//! Latała's moment functional for sums of centered Bernoulli variables, with
//! the exact d-th norm for comparison.
//!
//!     cargo run --example latala_norms

use collision::moments::{centered_bernoulli_moment, centered_bernoulli_sum_moment, latala_t, LATALA_DEFAULT_BRACKET};

fn main() -> collision::Result<()> {
    let families: [(&str, Vec<f64>); 4] = [
        ("12 x p=0.5", vec![0.5; 12]),
        ("12 x p=0.01", vec![0.01; 12]),
        ("1 x p=0.001", vec![0.001]),
        ("mixed", vec![0.5, 0.2, 0.05, 0.01, 0.001, 0.3]),
    ];
    println!("{:<14} {:>3} {:>12} {:>12} {:>7}", "family", "d", "T", "norm", "ratio");
    for (name, ps) in &families {
        for d in [2, 4, 8] {
            let t = latala_t(|k| ps.iter().map(|&p| centered_bernoulli_moment(p, k)).sum(), d, LATALA_DEFAULT_BRACKET)?;
            let norm = centered_bernoulli_sum_moment(ps, d)?.powf(1.0 / d as f64);
            println!("{name:<14} {d:>3} {t:>12.5e} {norm:>12.5e} {:>7.3}", norm / t);
        }
    }
    Ok(())
}
