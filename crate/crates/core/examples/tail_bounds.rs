//! Sub-gamma parameters of the estimator and the tail envelope over a grid
//! of deviations, branch by branch.
//!
//!     cargo run --example tail_bounds -- [m] [n]

use collision::bounds::{estimator_tail_envelope, subgamma_tail, SubGammaParams};
use collision::defaults;
use collision::distribution::zipf;

fn main() -> collision::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let m: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let n: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2000);

    let pmf = zipf(m, 1.2)?;
    let q = pmf.collision_probability();
    let params = SubGammaParams::for_estimator(&pmf, n);
    let env = defaults::tail_envelope();
    println!("zipf({m}, 1.2), n = {n}: Q = {q:.4e}, v2 = {:.4e}, b = {:.4e}", params.v2, params.b);
    println!("{:>8} {:>11} {:>11} {:>11} {:>11} {:>11}", "eps/Q", "square", "linear", "heavy", "envelope", "sub-gamma");
    for rel in [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0] {
        let eps = rel * q;
        let [sq, lin, heavy] = env.branches(eps, params, n);
        println!(
            "{rel:>8} {sq:>11.4e} {lin:>11.4e} {heavy:>11.4e} {:>11.4e} {:>11.4e}",
            estimator_tail_envelope(eps, &pmf, n, &env),
            subgamma_tail(eps, params)?
        );
    }
    Ok(())
}
