//! Fitting the tail-envelope constants and the bin-moment constant.
//!
//! The envelope is fitted along a ray: the configured `(c_sq, c_lin, c_heavy)`
//! fix the ratios and a common factor is scaled as far as every cell allows.
//! Scaling all three exponents together keeps the feasible set a single
//! interval, so the fit is a closed-form minimum rather than a search.

use std::time::Instant;

use serde::Serialize;

use crate::bounds::{SubGammaParams, TailEnvelope};
use crate::distribution::AliasSampler;
use crate::error::{invalid, Error, Result};
use crate::moments::{bin_moment_bound_ln, bin_moment_exact};

use super::config::{CaseSpec, ExperimentConfig, ExperimentKind};
use super::experiments::{absolute_epsilons, simulate_q_hats, with_pool};
use super::report::{wilson_interval, ReportRow, TrialReport, Z95};

/// Multiplicative resolution of fitted constants.
pub const GRID_STEP: f64 = 1.1;

/// One Monte Carlo tail estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationCell {
    pub label: String,
    pub epsilon: f64,
    pub n: u64,
    pub params: SubGammaParams,
    pub trials: u64,
    pub events: u64,
}

impl CalibrationCell {
    pub fn wilson_hi(&self) -> f64 {
        wilson_interval(self.events, self.trials, Z95).1
    }

    /// Exponent branches with unit constants.
    fn unit_branches(&self) -> [f64; 3] {
        TailEnvelope {
            c_out: 1.0,
            c_sq: 1.0,
            c_lin: 1.0,
            c_heavy: 1.0,
        }
        .branches(self.epsilon, self.params, self.n)
    }

    fn ray_exponent(&self, base: &TailEnvelope) -> f64 {
        let [a, b, h] = self.unit_branches();
        (base.c_sq * a).min(base.c_lin * b).min(base.c_heavy * h)
    }
}

fn grid_floor(x: f64) -> f64 {
    GRID_STEP.powf((x.ln() / GRID_STEP.ln() + 1e-9).floor())
}

fn grid_ceil(x: f64) -> f64 {
    GRID_STEP.powf((x.ln() / GRID_STEP.ln() - 1e-9).ceil())
}

/// Largest exponent constants on the ray through `base` (quantized down to
/// powers of [`GRID_STEP`]) and then the smallest `c_out` (quantized up, at
/// most `base.c_out`) such that the envelope dominates every cell's upper
/// Wilson bound.
pub fn fit_envelope(cells: &[CalibrationCell], base: &TailEnvelope) -> Result<TailEnvelope> {
    base.validate()?;
    if cells.is_empty() {
        return invalid("calibration needs at least one cell");
    }
    let mut scale = f64::INFINITY;
    for cell in cells {
        let upper = cell.wilson_hi();
        if upper >= base.c_out {
            return Err(Error::Calibration {
                cell: format!(
                    "{} eps={} n={}: upper Wilson bound {upper} reaches c_out = {}",
                    cell.label, cell.epsilon, cell.n, base.c_out
                ),
            });
        }
        let exponent = cell.ray_exponent(base);
        scale = scale.min((base.c_out / upper).ln() / exponent);
    }
    let scale = grid_floor(scale);
    let mut fitted = TailEnvelope {
        c_out: base.c_out,
        c_sq: base.c_sq * scale,
        c_lin: base.c_lin * scale,
        c_heavy: base.c_heavy * scale,
    };
    let needed = cells
        .iter()
        .map(|c| c.wilson_hi() * c.ray_exponent(&fitted).exp())
        .fold(0.0, f64::max);
    fitted.c_out = grid_ceil(needed).min(base.c_out);
    fitted.validate()?;
    Ok(fitted)
}

fn calibration_cases(cfg: &ExperimentConfig) -> Result<Vec<CaseSpec>> {
    let mut cases = Vec::new();
    if let Some(n) = cfg.n {
        cases.push(CaseSpec {
            distribution: cfg.distribution.clone(),
            n,
            epsilons: cfg.epsilons.clone(),
            relative_epsilons: cfg.relative_epsilons,
        });
    }
    cases.extend(cfg.cases.iter().cloned());
    if cases.is_empty() {
        return invalid("calibration needs n or at least one entry in cases");
    }
    Ok(cases)
}

/// Monte Carlo cells for every case of a `calibrate` config. Case `i` uses
/// stream cell `i`.
pub fn calibration_cells(cfg: &ExperimentConfig) -> Result<Vec<CalibrationCell>> {
    cfg.validate()?;
    if cfg.kind != ExperimentKind::Calibrate {
        return invalid(format!("expected a calibrate config, got kind {}", cfg.kind.as_str()));
    }
    let mut cells = Vec::new();
    for (ci, case) in calibration_cases(cfg)?.iter().enumerate() {
        let pmf = case.distribution.build()?;
        let q = pmf.collision_probability();
        let sampler = AliasSampler::new(&pmf)?;
        let q_hats = with_pool(cfg.workers, || simulate_q_hats(&sampler, case.n, cfg.seed, ci as u64, 0, cfg.trials))??;
        let params = SubGammaParams::for_estimator(&pmf, case.n);
        for eps in absolute_epsilons(&case.epsilons, case.relative_epsilons, q) {
            cells.push(CalibrationCell {
                label: case.distribution.label(),
                epsilon: eps,
                n: case.n,
                params,
                trials: cfg.trials,
                events: q_hats.iter().filter(|&&x| (x - q).abs() > eps).count() as u64,
            });
        }
    }
    Ok(cells)
}

/// Fits envelope constants to the cells of a `calibrate` config, using the
/// configured envelope as the ray and the ceiling for `c_out`.
pub fn calibrate_constants(cfg: &ExperimentConfig) -> Result<TailEnvelope> {
    fit_envelope(&calibration_cells(cfg)?, &cfg.envelope)
}

/// Calibration as a report: one row per cell, checked against the fitted envelope.
pub fn run_calibration(cfg: &ExperimentConfig) -> Result<TrialReport> {
    let start = Instant::now();
    let cells = calibration_cells(cfg)?;
    let fitted = fit_envelope(&cells, &cfg.envelope)?;
    let rows = cells
        .iter()
        .map(|c| {
            let bound = fitted.evaluate(c.epsilon, c.params, c.n);
            ReportRow::frequency(c.label.clone(), c.epsilon, c.n, c.trials, c.events, bound)
        })
        .collect();
    let mut report = TrialReport::new(cfg, rows, start.elapsed().as_secs_f64());
    report.fitted_envelope = Some(fitted);
    Ok(report)
}

/// One `(n, p, d)` point of the bin-moment fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinMomentCell {
    pub n: u64,
    pub p: f64,
    pub d: u32,
}

/// Smallest `c` with `bin_moment_bound(n, p, d, c, c) >= bin_moment_exact(n, p, d)`
/// on every cell, to relative precision `1e-9`.
pub fn fit_bin_moment_constant(cells: &[BinMomentCell]) -> Result<f64> {
    if cells.is_empty() {
        return invalid("bin-moment fit needs at least one cell");
    }
    let mut worst: f64 = 0.0;
    for cell in cells {
        let exact = bin_moment_exact(cell.n, cell.p, cell.d)?;
        if exact == 0.0 {
            continue;
        }
        let target = exact.ln();
        let covers = |c: f64| bin_moment_bound_ln(cell.n, cell.p, cell.d, c, c).map(|b| b >= target);
        let (mut lo, mut hi) = (1e-6, 1.0);
        while !covers(hi)? {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::Calibration {
                    cell: format!("n={} p={} d={}", cell.n, cell.p, cell.d),
                });
            }
        }
        if covers(lo)? {
            continue;
        }
        while hi / lo - 1.0 > 1e-9 {
            let mid = (lo * hi).sqrt();
            if covers(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        worst = worst.max(hi);
    }
    Ok(worst)
}
