//! The collision estimator and what is built on it: the uniformity tester,
//! collision-entropy estimates and sample-size rules.
//!
//! The estimator counts ordered pairs `i != j` with `X_i == X_j` and divides
//! by `n(n-1)`. From a histogram the numerator is `sum_x S_x (S_x - 1)`,
//! accumulated in `u128` so it is exact for any realistic `n`.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::ceil_tolerant;

/// Bin loads `S_x` of an i.i.d. sample of size `n = sum_x S_x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleHistogram {
    counts: Vec<u64>,
    n: u64,
}

impl SampleHistogram {
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        let n: u64 = counts.iter().sum();
        if n < 2 {
            return invalid(format!("histogram needs n >= 2 samples, got {n}"));
        }
        Ok(Self { counts, n })
    }

    /// Interns symbols by first appearance; bin `i` counts the `i`-th distinct symbol.
    pub fn from_symbols<T: Hash + Eq>(symbols: &[T]) -> Result<Self> {
        let mut index: HashMap<&T, usize> = HashMap::new();
        let mut counts = Vec::new();
        for s in symbols {
            let next = index.len();
            let slot = *index.entry(s).or_insert(next);
            if slot == counts.len() {
                counts.push(0);
            }
            counts[slot] += 1;
        }
        Self::from_counts(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of bins with a nonzero count.
    pub fn support(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }
}

/// `q_hat = collision_pairs / (n (n - 1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollisionEstimate {
    pub q_hat: f64,
    pub n: u64,
    /// Ordered colliding pairs.
    pub collision_pairs: u128,
}

impl CollisionEstimate {
    fn new(collision_pairs: u128, n: u64) -> Self {
        let total = n as u128 * (n as u128 - 1);
        Self {
            q_hat: collision_pairs as f64 / total as f64,
            n,
            collision_pairs,
        }
    }
}

/// Contribution `S_x^2 - S_x` of bin `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BinContribution {
    pub x: usize,
    pub value: u128,
}

/// O(n^2) pair count. Kept as the reference for [`estimate_from_histogram`].
pub fn estimate_pairwise<T: PartialEq>(sample: &[T]) -> Result<CollisionEstimate> {
    let n = sample.len();
    if n < 2 {
        return invalid(format!("sample needs n >= 2, got {n}"));
    }
    let mut pairs: u128 = 0;
    for i in 0..n {
        for j in 0..n {
            if i != j && sample[i] == sample[j] {
                pairs += 1;
            }
        }
    }
    Ok(CollisionEstimate::new(pairs, n as u64))
}

pub fn estimate_from_histogram(hist: &SampleHistogram) -> Result<CollisionEstimate> {
    if hist.n < 2 {
        return invalid(format!("histogram needs n >= 2, got {}", hist.n));
    }
    let pairs = hist
        .counts
        .iter()
        .map(|&s| s as u128 * (s as u128).saturating_sub(1))
        .sum();
    Ok(CollisionEstimate::new(pairs, hist.n))
}

/// One entry per bin with nonzero count.
pub fn bin_contributions(hist: &SampleHistogram) -> Vec<BinContribution> {
    hist.counts
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0)
        .map(|(x, &s)| BinContribution {
            x,
            value: s as u128 * (s as u128 - 1),
        })
        .collect()
}

/// Centered bin contribution split into its linear and quadratic parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenteredDecomposition {
    /// `S^2 - S - n(n-1)p^2`
    pub lhs: f64,
    /// `U1 = sum_i xi_i = S - np`
    pub u1: f64,
    /// `U2 = sum_{i != j} xi_i xi_j`
    pub u2: f64,
}

impl CenteredDecomposition {
    /// `U2 + 2(n-1)p U1`, which equals `lhs`.
    pub fn recombine(&self, n: u64, p: f64) -> f64 {
        self.u2 + 2.0 * (n as f64 - 1.0) * p * self.u1
    }
}

/// Decomposes a bin load `s` out of `n` draws with cell probability `p`,
/// where `xi_i = 1{X_i = x} - p`.
pub fn centered_decomposition(s: u64, n: u64, p: f64) -> Result<CenteredDecomposition> {
    if s > n {
        return invalid(format!("bin load {s} exceeds sample size {n}"));
    }
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("cell probability must lie in [0,1], got {p}"));
    }
    let (s, nf) = (s as f64, n as f64);
    let lhs = s * s - s - nf * (nf - 1.0) * p * p;
    let u1 = s - nf * p;
    let sum_sq = s * (1.0 - p) * (1.0 - p) + (nf - s) * p * p;
    let u2 = u1 * u1 - sum_sq;
    Ok(CenteredDecomposition { lhs, u1, u2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Uniform,
    NonUniform,
}

impl Decision {
    pub fn as_str(&self) -> &'static str {
        match self {
            Decision::Uniform => "uniform",
            Decision::NonUniform => "non_uniform",
        }
    }
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformityVerdict {
    pub decision: Decision,
    pub q_hat: f64,
    /// `(1 + epsilon) / m`
    pub threshold: f64,
    /// Whether `1/sqrt(m) <= epsilon <= 1`, the range with a sample-size guarantee.
    pub epsilon_in_range: bool,
}

/// Threshold rule on an already computed estimate: non-uniform iff
/// `q_hat > (1 + epsilon) / m`. Equality counts as uniform.
pub fn decide(q_hat: f64, m: usize, epsilon: f64) -> Result<UniformityVerdict> {
    if m == 0 {
        return invalid("domain size m must be at least 1");
    }
    if !epsilon.is_finite() {
        return invalid(format!("epsilon must be finite, got {epsilon}"));
    }
    let epsilon_in_range = epsilon >= 1.0 / (m as f64).sqrt() && epsilon <= 1.0;
    if !epsilon_in_range {
        log::warn!("epsilon = {epsilon} is outside [1/sqrt(m), 1] for m = {m}; the tester's sample-size guarantee does not apply");
    }
    let threshold = (1.0 + epsilon) / m as f64;
    let decision = if q_hat > threshold {
        Decision::NonUniform
    } else {
        Decision::Uniform
    };
    Ok(UniformityVerdict {
        decision,
        q_hat,
        threshold,
        epsilon_in_range,
    })
}

/// Collision-based uniformity tester over a domain of size `m`.
pub fn uniformity_test(hist: &SampleHistogram, m: usize, epsilon: f64) -> Result<UniformityVerdict> {
    let est = estimate_from_histogram(hist)?;
    decide(est.q_hat, m, epsilon)
}

/// `-log_base(q_hat)`.
pub fn entropy_estimate(hist: &SampleHistogram, base: f64) -> Result<f64> {
    entropy_from_q(estimate_from_histogram(hist)?.q_hat, base)
}

pub(crate) fn entropy_from_q(q_hat: f64, base: f64) -> Result<f64> {
    if !(base > 1.0) || !base.is_finite() {
        return invalid(format!("logarithm base must be finite and > 1, got {base}"));
    }
    if q_hat <= 0.0 {
        return Err(Error::NoCollisions);
    }
    // -ln(1) would print as -0
    Ok(0.0 - q_hat.ln() / base.ln())
}

fn log_inv_delta(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return invalid(format!("delta must lie in (0,1), got {delta}"));
    }
    Ok((-delta.ln()).max(1.0))
}

fn check_constant(c: f64) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return invalid(format!("sample-size constant must be finite and > 0, got {c}"));
    }
    Ok(())
}

/// `ceil(C * max(1, ln(1/delta)) * sqrt(m) / epsilon)`, at least 2.
pub fn tester_sample_size(m: usize, epsilon: f64, delta: f64, c: f64) -> Result<u64> {
    if m == 0 {
        return invalid("domain size m must be at least 1");
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return invalid(format!("epsilon must lie in (0,1], got {epsilon}"));
    }
    check_constant(c)?;
    let raw = c * log_inv_delta(delta)? * (m as f64).sqrt() / epsilon;
    Ok((ceil_tolerant(raw) as u64).max(2))
}

/// `ceil(C * max(1, ln(1/delta)) / (sqrt(q_lower) * epsilon^2))`, at least 2.
pub fn entropy_sample_size(q_lower: f64, epsilon: f64, delta: f64, c: f64) -> Result<u64> {
    if !(q_lower > 0.0 && q_lower <= 1.0) {
        return invalid(format!("q_lower must lie in (0,1], got {q_lower}"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return invalid(format!("epsilon must lie in (0,1), got {epsilon}"));
    }
    check_constant(c)?;
    let raw = c * log_inv_delta(delta)? / (q_lower.sqrt() * epsilon * epsilon);
    Ok((ceil_tolerant(raw) as u64).max(2))
}
