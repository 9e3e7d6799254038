//! Exact moment oracles and the moment bounds behind the tail envelope.
//!
//! Two tiers live side by side:
//!
//! * exact values, computed by convolution of binomial pmfs, dynamic
//!   programming over partial sums, or full enumeration of small sample
//!   spaces;
//! * closed-form upper bounds with explicit constants, evaluated in log
//!   space because terms like `d^d (np)^(d+1)` overflow `f64` quickly.
//!
//! The bounds are only trustworthy where they dominate the exact values, and
//! the test suite checks exactly that on enumerable grids.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numeric::{compensated_sum, ln_binomial, log_sum_exp};

/// Even-order moments of one random variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentTable {
    entries: BTreeMap<u32, f64>,
    meta: String,
}

impl MomentTable {
    pub fn new(meta: impl Into<String>) -> Self {
        Self {
            entries: BTreeMap::new(),
            meta: meta.into(),
        }
    }

    pub fn from_entries(meta: impl Into<String>, entries: &[(u32, f64)]) -> Result<Self> {
        let mut table = Self::new(meta);
        for &(d, v) in entries {
            table.insert(d, v)?;
        }
        Ok(table)
    }

    /// Adds the moment of order `d`; `d` must be even and at least 2.
    pub fn insert(&mut self, d: u32, value: f64) -> Result<()> {
        check_even_order(d)?;
        if !(value >= 0.0) || !value.is_finite() {
            return invalid(format!("moment of order {d} must be finite and >= 0, got {value}"));
        }
        self.entries.insert(d, value);
        Ok(())
    }

    pub fn get(&self, d: u32) -> Option<f64> {
        self.entries.get(&d).copied()
    }

    pub fn orders(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.entries.iter().map(|(&d, &v)| (d, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn meta(&self) -> &str {
        &self.meta
    }
}

fn check_even_order(d: u32) -> Result<()> {
    if d < 2 || d % 2 != 0 {
        return invalid(format!("moment order must be even and >= 2, got {d}"));
    }
    Ok(())
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("probability must lie in [0,1], got {p}"));
    }
    Ok(())
}

/// Binomial(n, p) pmf on `0..=n`.
///
/// Built by the ratio recurrence outward from the mode, then normalized with
/// compensated summation, so large `n` does not underflow `q^n`.
pub fn binomial_pmf(n: u64, p: f64) -> Result<Vec<f64>> {
    check_probability(p)?;
    let len = n as usize + 1;
    let mut pmf = vec![0.0; len];
    if p == 0.0 {
        pmf[0] = 1.0;
        return Ok(pmf);
    }
    if p == 1.0 {
        pmf[n as usize] = 1.0;
        return Ok(pmf);
    }
    let q = 1.0 - p;
    let odds = p / q;
    let mode = (((n + 1) as f64 * p).floor() as usize).min(n as usize);
    pmf[mode] = 1.0;
    for k in mode..n as usize {
        pmf[k + 1] = pmf[k] * ((n as usize - k) as f64 / (k + 1) as f64) * odds;
    }
    for k in (1..=mode).rev() {
        pmf[k - 1] = pmf[k] * (k as f64 / (n as usize - k + 1) as f64) / odds;
    }
    let total = compensated_sum(pmf.iter().copied());
    pmf.iter_mut().for_each(|v| *v /= total);
    Ok(pmf)
}

/// Exact `E(S - S')^d` for independent `S, S' ~ Binomial(n, p)`.
pub fn symm_diff_moment_exact(n: u64, p: f64, d: u32) -> Result<f64> {
    check_even_order(d)?;
    let pmf = binomial_pmf(n, p)?;
    let n = n as usize;
    // pmf of S - S' on -n..=n, index shifted by n
    let diff: Vec<f64> = (0..=2 * n)
        .map(|idx| {
            let k = idx as i64 - n as i64;
            compensated_sum((0..=n).filter_map(|s| {
                let t = s as i64 - k;
                (0..=n as i64).contains(&t).then(|| pmf[s] * pmf[t as usize])
            }))
        })
        .collect();
    Ok(compensated_sum(diff.iter().enumerate().map(|(idx, &w)| {
        let k = idx as f64 - n as f64;
        w * k.powi(d as i32)
    })))
}

/// `(C d)^(d/2) sum_{l=1}^{d/2} C(n,l) l^(d/2) sigma^(2l)` with `sigma^2 = 2p(1-p)`.
pub fn symm_diff_moment_bound(n: u64, p: f64, d: u32, c: f64) -> Result<f64> {
    check_even_order(d)?;
    check_probability(p)?;
    if !(c > 0.0) {
        return invalid(format!("constant must be > 0, got {c}"));
    }
    let sigma2 = 2.0 * p * (1.0 - p);
    if sigma2 == 0.0 || n == 0 {
        return Ok(0.0);
    }
    let half = (d / 2) as u64;
    let terms: Vec<f64> = (1..=half.min(n))
        .map(|l| ln_binomial(n, l) + half as f64 * (l as f64).ln() + l as f64 * sigma2.ln())
        .collect();
    Ok((half as f64 * (c * d as f64).ln() + log_sum_exp(&terms)).exp())
}

fn big_binomials(d: u32) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
    for r in 1..=d as usize {
        let prev = &rows[r - 1];
        let mut row = vec![BigUint::one(); r + 1];
        for k in 1..r {
            row[k] = &prev[k - 1] + &prev[k];
        }
        rows.push(row);
    }
    rows
}

/// Exact `E(r_1 + ... + r_l)^d` for i.i.d. Rademacher signs.
///
/// Tracks how many of the `2^l` sign patterns reach each partial sum, then
/// divides the weighted power sum by `2^l`, which is exact.
pub fn rademacher_moment_exact(l: u32, d: u32) -> Result<BigUint> {
    if l == 0 || l > 64 {
        return invalid(format!("number of signs must lie in 1..=64, got {l}"));
    }
    if d % 2 != 0 || d > 32 {
        return invalid(format!("order must be even and <= 32, got {d}"));
    }
    let width = 2 * l as usize + 1;
    let offset = l as usize;
    let mut counts = vec![BigUint::zero(); width];
    counts[offset] = BigUint::one();
    for _ in 0..l {
        let mut next = vec![BigUint::zero(); width];
        for (idx, c) in counts.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            next[idx - 1] += c;
            next[idx + 1] += c;
        }
        counts = next;
    }
    let total: BigUint = counts
        .iter()
        .enumerate()
        .map(|(idx, c)| c * BigUint::from(idx.abs_diff(offset)).pow(d))
        .sum();
    debug_assert!((&total % (BigUint::one() << l as usize)).is_zero());
    Ok(total >> l as usize)
}

/// `(d l)^(d/2)`, the Khintchine-type ceiling for [`rademacher_moment_exact`].
pub fn rademacher_moment_ceiling(l: u32, d: u32) -> BigUint {
    BigUint::from(d as u64 * l as u64).pow(d / 2)
}

/// Sum of multinomial coefficients `C(d; c_1, ..., c_l)` over compositions of
/// `d` into `l` parts that are all even and positive.
pub fn even_multinomial_sum(l: u32, d: u32) -> Result<BigUint> {
    check_even_order(d)?;
    if l == 0 {
        return invalid("number of parts must be at least 1");
    }
    if l > d / 2 {
        return Ok(BigUint::zero());
    }
    let binom = big_binomials(d);
    let d = d as usize;
    // ways[r] = weighted count of compositions of r into the parts placed so far
    let mut ways = vec![BigUint::zero(); d + 1];
    ways[0] = BigUint::one();
    for _ in 0..l {
        let mut next = vec![BigUint::zero(); d + 1];
        for r in (2..=d).step_by(2) {
            for c in (2..=r).step_by(2) {
                if !ways[r - c].is_zero() {
                    next[r] += &binom[r][c] * &ways[r - c];
                }
            }
        }
        ways = next;
    }
    Ok(ways[d].clone())
}

const BRANCH_POINT: f64 = -1.0 / std::f64::consts::E;

/// Principal branch of the Lambert W function, `W(x) e^W(x) = x`, `x >= -1/e`.
pub fn lambert_w(x: f64) -> Result<f64> {
    if x.is_nan() || x < BRANCH_POINT {
        return Err(Error::Domain {
            function: "lambert_w",
            value: x,
        });
    }
    Ok(lambert_w_unchecked(x))
}

fn lambert_w_unchecked(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return f64::INFINITY;
    }
    let above_branch = x - BRANCH_POINT;
    if above_branch <= 0.0 {
        return -1.0;
    }
    let mut w = if x < -0.3 {
        // series in p = sqrt(2(ex + 1)) around the branch point
        let p = (2.0 * std::f64::consts::E * above_branch).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        x.ln_1p()
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if f == 0.0 || wp1 == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 1e-14 * w.abs() {
            break;
        }
    }
    w
}

/// Positive parameters of `g(l) = a^l l^(b - l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuxFunctionParams {
    pub a: f64,
    pub b: f64,
}

impl AuxFunctionParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return invalid(format!("a and b must be finite and > 0, got a={a}, b={b}"));
        }
        Ok(Self { a, b })
    }
}

/// `g(l) = a^l l^(b - l)`, evaluated as `exp(l ln a + (b - l) ln l)`. Meant for `l > 0`.
pub fn aux_g(l: f64, params: AuxFunctionParams) -> f64 {
    (l * params.a.ln() + (params.b - l) * l.ln()).exp()
}

/// The maximizer `b / W(b e / a)` of [`aux_g`] over `l > 0`.
pub fn aux_g_argmax(params: AuxFunctionParams) -> f64 {
    params.b / lambert_w_unchecked(params.b * std::f64::consts::E / params.a)
}

/// `a max(a, b)^(b-1)`, an upper bound on `g` over `[1, b]`.
pub fn aux_g_sup_bound(params: AuxFunctionParams) -> Result<f64> {
    if params.b < 1.0 {
        return invalid(format!("supremum bound needs b >= 1, got {}", params.b));
    }
    Ok((params.a.ln() + (params.b - 1.0) * params.a.max(params.b).ln()).exp())
}

/// Exact `E|Q_x - E Q_x|^d` for the bin contribution `Q_x = S^2 - S`, `S ~ Binomial(n, p)`.
pub fn bin_moment_exact(n: u64, p: f64, d: u32) -> Result<f64> {
    check_even_order(d)?;
    let pmf = binomial_pmf(n, p)?;
    let nf = n as f64;
    let mean = nf * (nf - 1.0) * p * p;
    Ok(compensated_sum(pmf.iter().enumerate().map(|(s, &w)| {
        let s = s as f64;
        w * (s * s - s - mean).abs().powi(d as i32)
    })))
}

/// Constants of [`bin_moment_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct BinMomentConstants {
    pub c1: f64,
    pub c2: f64,
}

/// `(C1 d)^d (np)^2 max(d,np)^(d-2) + (C2 d)^(d/2) (np)^(d+1) max(d,np)^(d/2-1)`.
pub fn bin_moment_bound(n: u64, p: f64, d: u32, c1: f64, c2: f64) -> Result<f64> {
    Ok(bin_moment_bound_ln(n, p, d, c1, c2)?.exp())
}

/// Natural log of [`bin_moment_bound`]; `-inf` when `np = 0`.
pub fn bin_moment_bound_ln(n: u64, p: f64, d: u32, c1: f64, c2: f64) -> Result<f64> {
    check_even_order(d)?;
    check_probability(p)?;
    if !(c1 > 0.0 && c2 > 0.0) {
        return invalid(format!("constants must be > 0, got C1={c1}, C2={c2}"));
    }
    let np = n as f64 * p;
    if np == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let df = d as f64;
    let ln_np = np.ln();
    let ln_max = df.max(np).ln();
    let light = df * (c1 * df).ln() + 2.0 * ln_np + (df - 2.0) * ln_max;
    let heavy = 0.5 * df * (c2 * df).ln() + (df + 1.0) * ln_np + (0.5 * df - 1.0) * ln_max;
    Ok(log_sum_exp(&[light, heavy]))
}

const MAX_BRACKET_EXPANSIONS: u32 = 60;

/// Smallest `T` with `sum_{k even, 2..=d} C(d,k) M_k / T^k <= d`, where
/// `M_k = moments(k)` is the summed `k`-th moment `sum_x E W_x^k`.
///
/// The left side is `sum_x E phi(W_x / T)` for
/// `phi(u) = ((1+u)^d + (1-u)^d)/2 - 1`, and it is non-increasing in `T`, so
/// the root is found by geometric bisection to relative precision `1e-10`.
/// The bracket is widened by halving/doubling up to 60 times.
pub fn latala_t<F>(moments: F, d: u32, bracket: (f64, f64)) -> Result<f64>
where
    F: Fn(u32) -> f64,
{
    check_even_order(d)?;
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) || !hi.is_finite() {
        return invalid(format!("bracket must satisfy 0 < lo < hi < inf, got ({lo}, {hi})"));
    }
    let mut coeffs = Vec::new();
    let mut c = 1.0f64;
    for k in 1..=d {
        c = c * (d - k + 1) as f64 / k as f64;
        if k % 2 == 0 {
            let m = moments(k);
            if !(m >= 0.0) || !m.is_finite() {
                return invalid(format!("moment sum of order {k} must be finite and >= 0, got {m}"));
            }
            coeffs.push((k as i32, c * m));
        }
    }
    if coeffs.iter().all(|&(_, w)| w == 0.0) {
        return Ok(0.0);
    }
    let target = d as f64;
    let excess = |t: f64| compensated_sum(coeffs.iter().map(|&(k, w)| w / t.powi(k))) - target;

    let mut expansions = 0;
    while excess(lo) <= 0.0 {
        if expansions == MAX_BRACKET_EXPANSIONS {
            return Err(Error::Bracket { expansions });
        }
        lo /= 2.0;
        expansions += 1;
    }
    expansions = 0;
    while excess(hi) > 0.0 {
        if expansions == MAX_BRACKET_EXPANSIONS {
            return Err(Error::Bracket { expansions });
        }
        hi *= 2.0;
        expansions += 1;
    }
    while hi / lo - 1.0 > 1e-10 {
        let mid = (lo * hi).sqrt();
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Default bracket for [`latala_t`].
pub const LATALA_DEFAULT_BRACKET: (f64, f64) = (f64::EPSILON, 1.0);

/// `E (B - p)^k` for `B ~ Bernoulli(p)`.
pub fn centered_bernoulli_moment(p: f64, k: u32) -> f64 {
    let k = k as i32;
    p * (1.0 - p).powi(k) + (1.0 - p) * (-p).powi(k)
}

/// Exact `E|sum_x (B_x - p_x)|^d` for independent Bernoullis, via the
/// Poisson-binomial distribution of the success count.
pub fn centered_bernoulli_sum_moment(ps: &[f64], d: u32) -> Result<f64> {
    for &p in ps {
        check_probability(p)?;
    }
    let mut dist = vec![1.0];
    for &p in ps {
        let mut next = vec![0.0; dist.len() + 1];
        for (k, &w) in dist.iter().enumerate() {
            next[k] += w * (1.0 - p);
            next[k + 1] += w * p;
        }
        dist = next;
    }
    let mean: f64 = ps.iter().sum();
    Ok(compensated_sum(
        dist.iter()
            .enumerate()
            .map(|(k, &w)| w * (k as f64 - mean).abs().powi(d as i32)),
    ))
}

fn check_enumerable(n: u32, d: u32) -> Result<()> {
    if n == 0 || n > 10 {
        return invalid(format!("enumeration supports 1 <= n <= 10, got {n}"));
    }
    check_even_order(d)
}

/// Every vector in `{1-p, -p}^n` with its probability.
fn centered_bernoulli_vectors(n: u32, p: f64) -> Vec<(Vec<f64>, f64)> {
    (0..1u32 << n)
        .map(|mask| {
            let mut prob = 1.0;
            let xi = (0..n)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        prob *= p;
                        1.0 - p
                    } else {
                        prob *= 1.0 - p;
                        -p
                    }
                })
                .collect();
            (xi, prob)
        })
        .collect()
}

/// Both sides of the decoupling inequality `E f(xi^T A xi) <= E f(4 xi^T A xi')`
/// for `f = |.|^d` and the off-diagonal all-ones matrix:
/// `(E|sum_{i!=j} xi_i xi_j|^d, 4^d E|sum_{i!=j} xi_i xi'_j|^d)`.
///
/// The factor sits inside `f`. With `4` outside (`4 E f(xi^T A xi')`) the
/// inequality already fails at `n = 2, p = 0.1, d = 4`.
pub fn decoupling_sides(n: u32, p: f64, d: u32) -> Result<(f64, f64)> {
    check_enumerable(n, d)?;
    check_probability(p)?;
    let vectors = centered_bernoulli_vectors(n, p);
    let quad = |x: &[f64]| {
        let s: f64 = x.iter().sum();
        s * s - x.iter().map(|v| v * v).sum::<f64>()
    };
    let lhs = compensated_sum(
        vectors
            .iter()
            .map(|(x, w)| w * quad(x).abs().powi(d as i32)),
    );
    let rhs = compensated_sum(vectors.iter().flat_map(|(x, wx)| {
        let sx: f64 = x.iter().sum();
        vectors.iter().map(move |(y, wy)| {
            let sy: f64 = y.iter().sum();
            let diag: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            wx * wy * (sx * sy - diag).abs().powi(d as i32)
        })
    }));
    Ok((lhs, 4f64.powi(d as i32) * rhs))
}

/// Whether the decoupled form dominates, up to `1e-12` relative rounding.
pub fn decoupling_check(n: u32, p: f64, d: u32) -> Result<bool> {
    let (lhs, rhs) = decoupling_sides(n, p, d)?;
    Ok(lhs <= rhs * (1.0 + 1e-12))
}

/// Both sides of the symmetrization inequality
/// `(E|sum_i xi_i|^d, E|sum_i eta_i|^d)`, `eta` a difference of two
/// independent Bernoulli(p).
pub fn symmetrization_sides(n: u32, p: f64, d: u32) -> Result<(f64, f64)> {
    check_enumerable(n, d)?;
    check_probability(p)?;
    let lhs = compensated_sum(
        centered_bernoulli_vectors(n, p)
            .iter()
            .map(|(x, w)| w * x.iter().sum::<f64>().abs().powi(d as i32)),
    );
    let tail = p * (1.0 - p);
    let outcomes = [(-1.0, tail), (0.0, 1.0 - 2.0 * tail), (1.0, tail)];
    let rhs = compensated_sum((0..3u32.pow(n)).map(|mut code| {
        let mut sum: f64 = 0.0;
        let mut prob = 1.0;
        for _ in 0..n {
            let (v, w) = outcomes[(code % 3) as usize];
            sum += v;
            prob *= w;
            code /= 3;
        }
        prob * sum.abs().powi(d as i32)
    }));
    Ok((lhs, rhs))
}

pub fn symmetrization_check(n: u32, p: f64, d: u32) -> Result<bool> {
    let (lhs, rhs) = symmetrization_sides(n, p, d)?;
    Ok(lhs <= rhs * (1.0 + 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn moment_table_validation() {
        let mut t = MomentTable::new("x");
        assert!(t.insert(3, 1.0).is_err());
        assert!(t.insert(0, 1.0).is_err());
        assert!(t.insert(2, -1.0).is_err());
        assert!(t.insert(2, f64::NAN).is_err());
        t.insert(4, 2.0).unwrap();
        assert_eq!(t.get(4), Some(2.0));
        assert!(MomentTable::from_entries("y", &[(2, 1.0), (5, 1.0)]).is_err());
    }

    #[test]
    fn binomial_pmf_examples() {
        assert_eq!(binomial_pmf(2, 0.5).unwrap(), vec![0.25, 0.5, 0.25]);
        let b = binomial_pmf(1, 0.3).unwrap();
        assert!(close(b[0], 0.7, 1e-15) && close(b[1], 0.3, 1e-15));
        assert_eq!(binomial_pmf(4, 0.0).unwrap(), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(binomial_pmf(3, 1.0).unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
        assert!(binomial_pmf(3, 1.5).is_err());
    }

    #[test]
    fn binomial_pmf_large_n_normalized() {
        let pmf = binomial_pmf(5000, 0.5).unwrap();
        assert!((compensated_sum(pmf.iter().copied()) - 1.0).abs() < 1e-12);
        let mean = compensated_sum(pmf.iter().enumerate().map(|(k, w)| k as f64 * w));
        assert!((mean - 2500.0).abs() < 1e-8);
    }

    #[test]
    fn binomial_pmf_matches_direct_formula() {
        let n = 12u64;
        let p = 0.37;
        let pmf = binomial_pmf(n, p).unwrap();
        for k in 0..=n {
            let direct = ln_binomial(n, k).exp() * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
            assert!(close(pmf[k as usize], direct, 1e-12));
        }
    }

    #[test]
    fn symm_diff_exact_examples() {
        assert!(close(symm_diff_moment_exact(2, 0.5, 4).unwrap(), 2.5, 1e-14));
        for &(n, p) in &[(1u64, 0.3), (7, 0.1), (25, 0.5), (40, 0.93)] {
            let want = 2.0 * n as f64 * p * (1.0 - p);
            assert!(close(symm_diff_moment_exact(n, p, 2).unwrap(), want, 1e-12));
        }
        assert_eq!(symm_diff_moment_exact(10, 0.0, 6).unwrap(), 0.0);
        assert!(symm_diff_moment_exact(10, 0.5, 3).is_err());
    }

    #[test]
    fn symm_diff_bound_examples() {
        assert_eq!(symm_diff_moment_bound(10, 0.0, 4, 1.0).unwrap(), 0.0);
        for &(n, p) in &[(3u64, 0.2), (50, 0.01)] {
            let sigma2 = 2.0 * p * (1.0 - p);
            let bound = symm_diff_moment_bound(n, p, 2, 1.0).unwrap();
            assert!(close(bound, 2.0 * n as f64 * sigma2, 1e-12));
            assert!(bound >= symm_diff_moment_exact(n, p, 2).unwrap());
        }
        assert!(symm_diff_moment_bound(10, 0.5, 5, 1.0).is_err());
    }

    #[test]
    fn rademacher_examples() {
        assert_eq!(rademacher_moment_exact(2, 2).unwrap(), BigUint::from(2u32));
        for d in (0..=20).step_by(2) {
            assert_eq!(rademacher_moment_exact(1, d).unwrap(), BigUint::one());
        }
        assert_eq!(rademacher_moment_exact(2, 4).unwrap(), BigUint::from(8u32));
        // largest supported instance stays exact
        let big = rademacher_moment_exact(64, 32).unwrap();
        assert!(big > BigUint::from(u128::MAX));
        assert!(rademacher_moment_exact(0, 2).is_err());
        assert!(rademacher_moment_exact(65, 2).is_err());
        assert!(rademacher_moment_exact(3, 3).is_err());
        assert!(rademacher_moment_exact(3, 34).is_err());
    }

    #[test]
    fn rademacher_second_and_fourth_moments_closed_form() {
        // E S^2 = l, E S^4 = 3l^2 - 2l
        for l in 1..=30u32 {
            assert_eq!(rademacher_moment_exact(l, 2).unwrap(), BigUint::from(l));
            assert_eq!(rademacher_moment_exact(l, 4).unwrap(), BigUint::from(3 * l * l - 2 * l));
        }
    }

    /// Brute force over all compositions into `l` even positive parts.
    fn multinomial_oracle(l: u32, d: u32) -> u128 {
        fn fact(k: u32) -> u128 {
            (1..=k as u128).product()
        }
        fn rec(parts_left: u32, rest: u32, denom: u128, d: u32, acc: &mut u128) {
            if parts_left == 0 {
                if rest == 0 {
                    *acc += fact(d) / denom;
                }
                return;
            }
            let mut c = 2;
            while c <= rest {
                rec(parts_left - 1, rest - c, denom * fact(c), d, acc);
                c += 2;
            }
        }
        let mut acc = 0;
        rec(l, d, 1, d, &mut acc);
        acc
    }

    #[test]
    fn even_multinomial_examples() {
        assert_eq!(even_multinomial_sum(2, 4).unwrap(), BigUint::from(6u32));
        for d in (2..=20).step_by(2) {
            assert_eq!(even_multinomial_sum(1, d).unwrap(), BigUint::one());
        }
        assert_eq!(even_multinomial_sum(2, 6).unwrap(), BigUint::from(30u32));
        assert!(even_multinomial_sum(4, 6).unwrap().is_zero());
        assert!(even_multinomial_sum(1, 3).is_err());
        for d in (2..=16).step_by(2) {
            for l in 1..=d / 2 {
                assert_eq!(
                    even_multinomial_sum(l, d).unwrap(),
                    BigUint::from(multinomial_oracle(l, d)),
                    "l={l} d={d}"
                );
            }
        }
    }

    /// Independent route to W(1): iterate w <- exp(-w).
    fn omega_by_fixed_point() -> f64 {
        let mut w: f64 = 0.5;
        for _ in 0..10_000 {
            let next = (-w).exp();
            if (next - w).abs() < 1e-17 {
                break;
            }
            w = next;
        }
        w
    }

    #[test]
    fn lambert_w_examples() {
        assert_eq!(lambert_w(0.0).unwrap(), 0.0);
        assert!((lambert_w(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        let omega = omega_by_fixed_point();
        assert!((omega - 0.567_143_290_409_783_8).abs() < 1e-12);
        assert!((lambert_w(1.0).unwrap() - omega).abs() < 1e-12);
        assert_eq!(lambert_w(BRANCH_POINT).unwrap(), -1.0);
        assert!(matches!(lambert_w(-0.5), Err(Error::Domain { .. })));
        assert!(lambert_w(f64::NAN).is_err());
    }

    #[test]
    fn lambert_w_residual_near_branch_point() {
        for k in 1..=60 {
            let x = BRANCH_POINT + 10f64.powf(-(k as f64) / 4.0);
            let w = lambert_w(x).unwrap();
            assert!(w >= -1.0);
            assert!((w * w.exp() - x).abs() <= 1e-12 * x.abs(), "x={x}");
        }
    }

    #[test]
    fn aux_g_examples() {
        let p = AuxFunctionParams::new(0.2, 3.0).unwrap();
        assert!((aux_g(1.0, p) - 0.2).abs() < 1e-15);
        let star = aux_g_argmax(p);
        assert!((star - 1.1067).abs() < 1e-4, "{star}");
        assert!((aux_g(star, p) - 0.20409).abs() < 1e-5);
        assert!((aux_g(1.1067, p) - 0.20409).abs() < 1e-5);

        let e = std::f64::consts::E;
        for &l in &[0.5, 2.0, 7.5] {
            let q = AuxFunctionParams::new(e, l).unwrap();
            assert!(close(aux_g(l, q), l.exp(), 1e-14));
        }
        assert!(AuxFunctionParams::new(0.0, 1.0).is_err());
    }

    #[test]
    fn aux_g_argmax_via_omega() {
        // a = e b makes b e / a = 1
        let b = 2.5;
        let p = AuxFunctionParams::new(std::f64::consts::E * b, b).unwrap();
        assert!(close(aux_g_argmax(p), b / omega_by_fixed_point(), 1e-12));
    }

    #[test]
    fn aux_g_sup_examples() {
        let p = AuxFunctionParams::new(0.2, 3.0).unwrap();
        assert!(close(aux_g_sup_bound(p).unwrap(), 1.8, 1e-14));
        let grid_max = (0..=20_000)
            .map(|i| 1.0 + 2.0 * i as f64 / 20_000.0)
            .map(|l| 0.2f64.powf(l) * l.powf(3.0 - l))
            .fold(0.0, f64::max);
        assert!((grid_max - 0.20409).abs() < 1e-4);
        assert!(grid_max <= 1.8);

        let eq = AuxFunctionParams::new(4.0, 4.0).unwrap();
        assert!(close(aux_g_sup_bound(eq).unwrap(), aux_g(4.0, eq), 1e-12));
        assert!(aux_g_sup_bound(AuxFunctionParams::new(1.0, 0.5).unwrap()).is_err());
    }

    #[test]
    fn aux_g_sup_bound_random_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let a = rng.random_range(0.01..10.0);
            let b = rng.random_range(1.0..10.0);
            let l = rng.random_range(1.0..=b);
            let p = AuxFunctionParams::new(a, b).unwrap();
            assert!(aux_g(l, p) <= aux_g_sup_bound(p).unwrap() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn aux_g_unimodal() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let p = AuxFunctionParams::new(rng.random_range(0.05..10.0), rng.random_range(0.5..10.0)).unwrap();
            let star = aux_g_argmax(p);
            let left: Vec<f64> = (1..=200).map(|i| star * i as f64 / 200.0).collect();
            let right: Vec<f64> = (0..=200).map(|i| star * (1.0 + 3.0 * i as f64 / 200.0)).collect();
            let lv: Vec<f64> = left.iter().map(|&l| aux_g(l, p)).collect();
            let rv: Vec<f64> = right.iter().map(|&l| aux_g(l, p)).collect();
            assert!(lv.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)));
            assert!(rv.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        }
    }

    #[test]
    fn bin_moment_exact_examples() {
        assert!(close(bin_moment_exact(2, 0.5, 2).unwrap(), 0.75, 1e-15));
        assert_eq!(bin_moment_exact(9, 0.0, 4).unwrap(), 0.0);
        assert_eq!(bin_moment_exact(2, 1.0, 2).unwrap(), 0.0);
        assert!(bin_moment_exact(2, 0.5, 1).is_err());
    }

    #[test]
    fn bin_moment_second_order_matches_monte_carlo() {
        use rand::SeedableRng;
        use rand_distr::{Binomial, Distribution};
        let (n, p) = (30u64, 0.2);
        let exact = bin_moment_exact(n, p, 2).unwrap();
        let mean = n as f64 * (n as f64 - 1.0) * p * p;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let bin = Binomial::new(n, p).unwrap();
        let trials = 200_000;
        let sq: Vec<f64> = (0..trials)
            .map(|_| {
                let s = bin.sample(&mut rng) as f64;
                (s * s - s - mean).powi(2)
            })
            .collect();
        let mc = sq.iter().sum::<f64>() / trials as f64;
        let sd = (sq.iter().map(|v| (v - mc).powi(2)).sum::<f64>() / trials as f64).sqrt();
        assert!((mc - exact).abs() <= 3.0 * sd / (trials as f64).sqrt(), "mc={mc} exact={exact}");
    }

    #[test]
    fn bin_moment_bound_examples() {
        assert_eq!(bin_moment_bound(10, 0.0, 4, 1.0, 1.0).unwrap(), 0.0);
        // d = 2: (2 C1)^2 (np)^2 + 2 C2 (np)^3
        let (n, p) = (40u64, 0.1);
        let np: f64 = 4.0;
        let want = 4.0 * np * np + 2.0 * np.powi(3);
        assert!(close(bin_moment_bound(n, p, 2, 1.0, 1.0).unwrap(), want, 1e-12));
        assert!(bin_moment_bound(10, 0.5, 3, 1.0, 1.0).is_err());
        assert!(bin_moment_bound(10, 0.5, 2, 0.0, 1.0).is_err());
    }

    #[test]
    fn latala_closed_forms() {
        let single = latala_t(|k| if k == 2 { 1.0 } else { 1.0 }, 2, LATALA_DEFAULT_BRACKET).unwrap();
        assert!((single - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        for m in [1u32, 4, 9, 100, 12_345] {
            let t = latala_t(|_| m as f64, 2, LATALA_DEFAULT_BRACKET).unwrap();
            assert!((t - (m as f64 / 2.0).sqrt()).abs() <= 1e-9 * t);
        }
    }

    #[test]
    fn latala_homogeneity() {
        let ps = [0.1, 0.3, 0.05, 0.5];
        let d = 6;
        let base = latala_t(
            |k| ps.iter().map(|&p| centered_bernoulli_moment(p, k)).sum(),
            d,
            LATALA_DEFAULT_BRACKET,
        )
        .unwrap();
        for lambda in [0.01f64, 3.0, 1e4] {
            let scaled = latala_t(
                |k| lambda.powi(k as i32) * ps.iter().map(|&p| centered_bernoulli_moment(p, k)).sum::<f64>(),
                d,
                LATALA_DEFAULT_BRACKET,
            )
            .unwrap();
            assert!((scaled - lambda * base).abs() <= 1e-8 * lambda * base);
        }
    }

    #[test]
    fn latala_errors() {
        assert!(latala_t(|_| 1.0, 3, LATALA_DEFAULT_BRACKET).is_err());
        assert!(latala_t(|_| -1.0, 2, LATALA_DEFAULT_BRACKET).is_err());
        assert!(latala_t(|_| 1.0, 2, (1.0, 0.5)).is_err());
        assert_eq!(latala_t(|_| 0.0, 4, LATALA_DEFAULT_BRACKET).unwrap(), 0.0);
        // root near 2^70 is beyond 60 doublings of the bracket
        let far = 2f64.powi(140);
        assert!(matches!(
            latala_t(|_| far, 2, LATALA_DEFAULT_BRACKET),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn centered_bernoulli_sum_moment_matches_enumeration() {
        let ps = [0.2, 0.7, 0.5];
        let d = 4;
        let mut brute = 0.0;
        for mask in 0..8u32 {
            let mut prob = 1.0;
            let mut sum: f64 = 0.0;
            for (i, &p) in ps.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    prob *= p;
                    sum += 1.0 - p;
                } else {
                    prob *= 1.0 - p;
                    sum -= p;
                }
            }
            brute += prob * sum.powi(d);
        }
        assert!(close(centered_bernoulli_sum_moment(&ps, d as u32).unwrap(), brute, 1e-14));
    }

    #[test]
    fn decoupling_examples() {
        let (lhs, rhs) = decoupling_sides(2, 0.5, 2).unwrap();
        assert!(close(lhs, 0.25, 1e-15));
        // 4^2 * 1/8
        assert!(close(rhs, 2.0, 1e-15));
        assert!(decoupling_check(2, 0.5, 2).unwrap());
        assert!(decoupling_check(3, 0.1, 4).unwrap());
        assert!(decoupling_check(4, 0.0, 6).unwrap());
        assert!(decoupling_check(0, 0.5, 2).is_err());
        assert!(decoupling_check(2, 0.5, 3).is_err());
    }

    #[test]
    fn decoupling_constant_must_sit_inside_f() {
        // E|xi^T A xi|^4 / E|xi^T A xi'|^4 at n = 3, p = 0.1 is 12.9464 > 4
        let (lhs, rhs) = decoupling_sides(3, 0.1, 4).unwrap();
        let ratio = lhs / (rhs / 4f64.powi(4));
        assert!(close(ratio, 12.9464, 1e-9), "{ratio}");
        assert!(lhs <= rhs);
    }

    #[test]
    fn symmetrization_examples() {
        let (lhs, rhs) = symmetrization_sides(2, 0.5, 2).unwrap();
        // n p (1-p) against 2 n p (1-p)
        assert!(close(lhs, 0.5, 1e-15));
        assert!(close(rhs, 1.0, 1e-15));
        assert!(symmetrization_check(2, 0.5, 2).unwrap());
        assert!(symmetrization_check(3, 0.2, 4).unwrap());
        assert!(symmetrization_check(3, 0.0, 4).unwrap());
    }

    #[test]
    fn symmetrized_side_is_binomial_difference() {
        for &(n, p, d) in &[(3u32, 0.2, 4u32), (4, 0.7, 6)] {
            let (_, rhs) = symmetrization_sides(n, p, d).unwrap();
            assert!(close(rhs, symm_diff_moment_exact(n as u64, p, d).unwrap(), 1e-12));
        }
    }

    #[test]
    fn quadratic_part_bounded_by_squared_binomial_moment() {
        for n in 1..=4u32 {
            for &p in &[0.1, 0.5, 0.9] {
                for d in [2u32, 4, 6] {
                    let (lhs, _) = decoupling_sides(n, p, d).unwrap();
                    let binom = symm_diff_moment_exact(n as u64, p, d).unwrap();
                    assert!(lhs <= 16.0 * binom * binom * (1.0 + 1e-12));
                }
            }
        }
    }
}
