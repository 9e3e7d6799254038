//! Principal-branch Lambert W and the auxiliary function
//! `g(l) = a^l l^(b - l)`: its maximizer and the supremum bound on [1, b].
//!
//!     cargo run --example special_functions

use collision::moments::{aux_g, aux_g_argmax, aux_g_sup_bound, lambert_w, AuxFunctionParams};

fn main() -> collision::Result<()> {
    println!("{:>12} {:>14} {:>10}", "x", "W(x)", "residual");
    for x in [-1.0 / std::f64::consts::E + 1e-9, -0.2, 1e-6, 1.0, std::f64::consts::E, 1e3, 1e8] {
        let w = lambert_w(x)?;
        println!("{x:>12.4e} {w:>14.10} {:>10.1e}", (w * w.exp() - x).abs() / x.abs());
    }

    println!("\n{:>5} {:>5} {:>10} {:>12} {:>12}", "a", "b", "argmax", "g(argmax)", "sup bound");
    for (a, b) in [(0.5, 3.0), (1.0, 4.0), (2.0, 6.0), (5.0, 10.0), (0.05, 8.0)] {
        let params = AuxFunctionParams::new(a, b)?;
        let l = aux_g_argmax(params);
        println!("{a:>5} {b:>5} {l:>10.5} {:>12.5e} {:>12.5e}", aux_g(l, params), aux_g_sup_bound(params)?);
    }
    Ok(())
}
