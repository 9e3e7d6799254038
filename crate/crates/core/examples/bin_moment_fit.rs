//! Fits the common bin-moment constant `C1 = C2 = c` over the grid
//! n in 2..=100, np log-spaced on [0.01, 50] with np <= n, d in {2, ..., 12},
//! and prints how tight the committed constants are.
//!
//!     cargo run --release --example bin_moment_fit -- [np_points]

use collision::defaults;
use collision::harness::{fit_bin_moment_constant, BinMomentCell};
use collision::moments::{bin_moment_bound, bin_moment_exact};

fn grid(points: usize) -> Vec<BinMomentCell> {
    let (lo, hi) = (0.01f64.ln(), 50f64.ln());
    let nps: Vec<f64> = (0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
        .collect();
    let mut cells = Vec::new();
    for n in 2..=100u64 {
        for &np in nps.iter().filter(|&&np| np <= n as f64) {
            for d in (2..=12).step_by(2) {
                cells.push(BinMomentCell { n, p: np / n as f64, d });
            }
        }
    }
    cells
}

fn main() -> collision::Result<()> {
    let points = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(30);
    let cells = grid(points);
    let c = fit_bin_moment_constant(&cells)?;
    println!("{} cells, smallest common constant c = {c:.6}", cells.len());

    let committed = defaults::BIN_MOMENT;
    let mut worst = (0.0f64, cells[0]);
    for cell in &cells {
        let exact = bin_moment_exact(cell.n, cell.p, cell.d)?;
        let bound = bin_moment_bound(cell.n, cell.p, cell.d, committed.c1, committed.c2)?;
        if exact / bound > worst.0 {
            worst = (exact / bound, *cell);
        }
    }
    println!(
        "committed C1={} C2={}: worst exact/bound = {:.4e} at n={} p={:.4e} d={}",
        committed.c1, committed.c2, worst.0, worst.1.n, worst.1.p, worst.1.d
    );
    Ok(())
}
