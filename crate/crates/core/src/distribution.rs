//! Finite discrete distributions: construction, exact power sums and
//! seeded i.i.d. sampling into histograms.
//!
//! Sampling goes through a Walker/Vose alias table, so a sampler costs O(m)
//! to build and O(1) per draw. Randomness comes from a ChaCha8 stream keyed
//! by a [`SampleSeed`]; the same `(master_seed, stream_id)` pair always
//! reproduces the same draws.

use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::estimator::SampleHistogram;
use crate::numeric::compensated_sum;

/// Tolerance on `sum(probs) == 1` accepted by [`DiscretePmf::from_probs`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// A probability mass function over the alphabet `0..m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretePmf {
    probs: Vec<f64>,
}

impl DiscretePmf {
    /// Normalizes non-negative weights into a pmf, keeping their order.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return invalid("weights must be non-empty");
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return invalid(format!("weight {i} is not finite ({w})"));
            }
            if w < 0.0 {
                return invalid(format!("weight {i} is negative ({w})"));
            }
        }
        let total = compensated_sum(weights.iter().copied());
        if total <= 0.0 {
            return invalid("at least one weight must be strictly positive");
        }
        Ok(Self {
            probs: weights.iter().map(|w| w / total).collect(),
        })
    }

    /// Wraps probabilities that already sum to one.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return invalid("pmf must have at least one entry");
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return invalid(format!("probability {i} is invalid ({p})"));
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return invalid(format!("probabilities sum to {total}, not 1"));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Alphabet size.
    pub fn m(&self) -> usize {
        self.probs.len()
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    /// `sum_x p_x^k` with compensated summation.
    pub fn power_sum(&self, k: u32) -> f64 {
        power_sum(self, k)
    }

    /// `Q = sum_x p_x^2`.
    pub fn collision_probability(&self) -> f64 {
        collision_probability(self)
    }
}

/// Same as [`DiscretePmf::from_weights`].
pub fn make_pmf(weights: &[f64]) -> Result<DiscretePmf> {
    DiscretePmf::from_weights(weights)
}

pub fn uniform(m: usize) -> Result<DiscretePmf> {
    if m == 0 {
        return invalid("uniform distribution needs m >= 1");
    }
    Ok(DiscretePmf {
        probs: vec![1.0 / m as f64; m],
    })
}

/// Half of the symbols get mass `(1 + sqrt(alpha)) / m`, the other half
/// `(1 - sqrt(alpha)) / m`. The result has `Q = (1 + alpha) / m` and squared
/// L2 distance `alpha / m` from uniform.
pub fn planted_bias(m: usize, alpha: f64) -> Result<DiscretePmf> {
    if m == 0 || m % 2 != 0 {
        return invalid(format!("planted_bias needs an even m >= 2, got {m}"));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return invalid(format!("planted_bias needs 0 <= alpha <= 1, got {alpha}"));
    }
    let beta = alpha.sqrt();
    let half = m / 2;
    let hi = (1.0 + beta) / m as f64;
    let lo = (1.0 - beta) / m as f64;
    let probs = std::iter::repeat(hi)
        .take(half)
        .chain(std::iter::repeat(lo).take(half))
        .collect();
    Ok(DiscretePmf { probs })
}

/// Zipf law truncated to `m` symbols: `p_k ∝ k^(-s)` for `k = 1..=m`.
pub fn zipf(m: usize, s: f64) -> Result<DiscretePmf> {
    if m == 0 {
        return invalid("zipf needs m >= 1");
    }
    if !(s >= 0.0) || !s.is_finite() {
        return invalid(format!("zipf exponent must be finite and >= 0, got {s}"));
    }
    let weights: Vec<f64> = (1..=m).map(|k| (k as f64).powf(-s)).collect();
    DiscretePmf::from_weights(&weights)
}

pub fn collision_probability(pmf: &DiscretePmf) -> f64 {
    power_sum(pmf, 2)
}

pub fn power_sum(pmf: &DiscretePmf, k: u32) -> f64 {
    let k = k as i32;
    compensated_sum(pmf.probs.iter().map(|p| p.powi(k)))
}

/// Identifies one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SampleSeed {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SampleSeed {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// ChaCha8 keyed by the master seed, positioned on `stream_id`.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Reusable alias-table sampler for one pmf.
#[derive(Debug, Clone)]
pub struct AliasSampler {
    m: usize,
    table: WeightedAliasIndex<f64>,
}

impl AliasSampler {
    pub fn new(pmf: &DiscretePmf) -> Result<Self> {
        let table = WeightedAliasIndex::new(pmf.probs.clone())
            .map_err(|e| Error::Validation(format!("cannot build alias table: {e}")))?;
        Ok(Self { m: pmf.m(), table })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Draws `n` symbols from `seed`'s stream.
    pub fn sample(&self, n: usize, seed: SampleSeed) -> Vec<usize> {
        let mut rng = seed.rng();
        (0..n).map(|_| self.table.sample(&mut rng)).collect()
    }

    /// Histogram of `n` draws. Consumes the stream exactly like [`Self::sample`].
    pub fn histogram(&self, n: u64, seed: SampleSeed) -> Result<SampleHistogram> {
        if n < 2 {
            return invalid(format!("sample size must be at least 2, got {n}"));
        }
        let mut rng = seed.rng();
        let mut counts = vec![0u64; self.m];
        for _ in 0..n {
            counts[self.table.sample(&mut rng)] += 1;
        }
        SampleHistogram::from_counts(counts)
    }
}

/// Draws an i.i.d. sample of size `n` and returns its histogram.
pub fn sample_histogram(pmf: &DiscretePmf, n: u64, seed: SampleSeed) -> Result<SampleHistogram> {
    if n < 2 {
        return invalid(format!("sample size must be at least 2, got {n}"));
    }
    AliasSampler::new(pmf)?.histogram(n, seed)
}

/// Declarative distribution description used by experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistributionSpec {
    Uniform { m: usize },
    Zipf { m: usize, s: f64 },
    PlantedBias { m: usize, alpha: f64 },
    Explicit { weights: Vec<f64> },
}

impl DistributionSpec {
    pub fn build(&self) -> Result<DiscretePmf> {
        match self {
            DistributionSpec::Uniform { m } => uniform(*m),
            DistributionSpec::Zipf { m, s } => zipf(*m, *s),
            DistributionSpec::PlantedBias { m, alpha } => planted_bias(*m, *alpha),
            DistributionSpec::Explicit { weights } => make_pmf(weights),
        }
    }

    /// Short label for reports, e.g. `zipf(1000,1.5)`.
    pub fn label(&self) -> String {
        match self {
            DistributionSpec::Uniform { m } => format!("uniform({m})"),
            DistributionSpec::Zipf { m, s } => format!("zipf({m},{s})"),
            DistributionSpec::PlantedBias { m, alpha } => format!("planted_bias({m},{alpha})"),
            DistributionSpec::Explicit { weights } => format!("explicit[{}]", weights.len()),
        }
    }
}
