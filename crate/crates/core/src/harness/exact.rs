use std::time::Instant;

use crate::distribution::DiscretePmf;
use crate::error::{invalid, Error, Result};
use crate::numeric::CompensatedSum;

use super::config::{ExperimentConfig, ExperimentKind};
use super::report::{ReportRow, TrialReport};

/// Largest sample space `m^n` enumerated exactly.
pub const MAX_ENUMERATION: u64 = 1_000_000;

/// Calls `visit(counts, prob)` once per sequence in `[m]^n`.
fn enumerate_sequences(pmf: &DiscretePmf, n: u32, mut visit: impl FnMut(&[u64], f64)) -> Result<()> {
    let m = pmf.m();
    let size = (m as u64).checked_pow(n).filter(|&s| s <= MAX_ENUMERATION);
    if size.is_none() {
        return invalid(format!("sample space m^n = {m}^{n} exceeds {MAX_ENUMERATION}"));
    }
    let probs = pmf.probs();
    let mut seq = vec![0usize; n as usize];
    let mut counts = vec![0u64; m];
    loop {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut prob = 1.0;
        for &x in &seq {
            counts[x] += 1;
            prob *= probs[x];
        }
        visit(&counts, prob);
        // odometer increment
        let mut i = 0;
        loop {
            if i == seq.len() {
                return Ok(());
            }
            seq[i] += 1;
            if seq[i] < m {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

/// Exact mean and variance of `q_hat` over all `m^n` samples.
pub fn exact_estimator_moments(pmf: &DiscretePmf, n: u32) -> Result<(f64, f64)> {
    if n < 2 {
        return invalid(format!("n must be at least 2, got {n}"));
    }
    let norm = n as f64 * (n as f64 - 1.0);
    let (mut first, mut second) = (CompensatedSum::new(), CompensatedSum::new());
    enumerate_sequences(pmf, n, |counts, prob| {
        let q: f64 = counts.iter().map(|&s| (s * s.saturating_sub(1)) as f64).sum::<f64>() / norm;
        first.add(prob * q);
        second.add(prob * q * q);
    })?;
    let mean = first.value();
    Ok((mean, (second.value() - mean * mean).max(0.0)))
}

/// Exact covariance matrix of the bin contributions `S_x^2 - S_x` by full
/// enumeration. `m` must match the pmf and `m^n` must not exceed
/// [`MAX_ENUMERATION`].
pub fn run_negcorr_check(m: usize, n: u32, pmf: &DiscretePmf) -> Result<Vec<Vec<f64>>> {
    if m != pmf.m() {
        return invalid(format!("m = {m} does not match the pmf's domain size {}", pmf.m()));
    }
    if n < 1 {
        return invalid("n must be at least 1");
    }
    let mut mean = vec![CompensatedSum::new(); m];
    let mut cross = vec![vec![CompensatedSum::new(); m]; m];
    enumerate_sequences(pmf, n, |counts, prob| {
        let z: Vec<f64> = counts.iter().map(|&s| (s * s.saturating_sub(1)) as f64).collect();
        for x in 0..m {
            mean[x].add(prob * z[x]);
            for y in 0..m {
                cross[x][y].add(prob * z[x] * z[y]);
            }
        }
    })?;
    let mean: Vec<f64> = mean.iter().map(CompensatedSum::value).collect();
    Ok((0..m)
        .map(|x| (0..m).map(|y| cross[x][y].value() - mean[x] * mean[y]).collect())
        .collect())
}

/// Tolerance for a covariance to count as non-positive.
const NEGCORR_TOLERANCE: f64 = 1e-12;

/// Report for a `negcorr` config: one row per pair `x < y`.
pub fn exact_negcorr_report(cfg: &ExperimentConfig) -> Result<TrialReport> {
    cfg.validate()?;
    if cfg.kind != ExperimentKind::Negcorr {
        return invalid(format!("expected a negcorr config, got kind {}", cfg.kind.as_str()));
    }
    let start = Instant::now();
    let n = cfg.n.ok_or_else(|| Error::Validation("negcorr experiments need n".into()))?;
    let n = u32::try_from(n).map_err(|_| Error::Validation(format!("n = {n} is too large to enumerate")))?;
    let pmf = cfg.distribution.build()?;
    let cov = run_negcorr_check(pmf.m(), n, &pmf)?;
    let mut rows = Vec::new();
    for x in 0..pmf.m() {
        for y in x + 1..pmf.m() {
            rows.push(ReportRow {
                case: format!("cov({x},{y})"),
                epsilon: None,
                n: n as u64,
                trials: 1,
                events: 0,
                value: cov[x][y],
                wilson_lo: None,
                wilson_hi: None,
                bound: Some(NEGCORR_TOLERANCE),
                pass: cov[x][y] <= NEGCORR_TOLERANCE,
            });
        }
    }
    let mut report = TrialReport::new(cfg, rows, start.elapsed().as_secs_f64());
    report.covariance = Some(cov);
    Ok(report)
}
