//! Exact moments of the symmetrized binomial difference and of a single
//! bin's contribution next to their closed-form bounds.
//!
//!     cargo run --example moment_tables -- [n] [p]

use collision::defaults;
use collision::moments::{bin_moment_bound, bin_moment_exact, symm_diff_moment_bound, symm_diff_moment_exact};

fn main() -> collision::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(40);
    let p: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let c = defaults::BIN_MOMENT;

    println!("n = {n}, p = {p}");
    println!("{:>3} {:>12} {:>12} {:>7} {:>12} {:>12} {:>7}", "d", "symm exact", "symm bound", "ratio", "bin exact", "bin bound", "ratio");
    for d in (2..=12).step_by(2) {
        let se = symm_diff_moment_exact(n, p, d)?;
        let sb = symm_diff_moment_bound(n, p, d, defaults::SYMM_DIFF_C)?;
        let be = bin_moment_exact(n, p, d)?;
        let bb = bin_moment_bound(n, p, d, c.c1, c.c2)?;
        println!("{d:>3} {se:>12.4e} {sb:>12.4e} {:>7.4} {be:>12.4e} {bb:>12.4e} {:>7.4}", se / sb, be / bb);
    }
    Ok(())
}
