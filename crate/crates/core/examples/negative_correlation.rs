//! Exact covariance matrix of the per-bin contributions `S_x^2 - S_x`,
//! by enumeration of every sample sequence.
//!
//!     cargo run --example negative_correlation -- [n]

use collision::distribution::make_pmf;
use collision::harness::run_negcorr_check;

fn main() -> collision::Result<()> {
    let n: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let pmf = make_pmf(&[0.4, 0.3, 0.2, 0.1])?;
    let cov = run_negcorr_check(pmf.m(), n, &pmf)?;
    println!("pmf {:?}, n = {n}", pmf.probs());
    for row in &cov {
        println!("{}", row.iter().map(|c| format!("{c:>10.4}")).collect::<String>());
    }
    let worst = (0..cov.len())
        .flat_map(|x| (0..cov.len()).filter(move |&y| y != x).map(move |y| (x, y)))
        .map(|(x, y)| cov[x][y])
        .fold(f64::NEG_INFINITY, f64::max);
    println!("largest off-diagonal entry: {worst:.4e}");
    Ok(())
}
