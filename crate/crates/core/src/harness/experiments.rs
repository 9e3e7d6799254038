use std::time::Instant;

use rayon::prelude::*;

use crate::bounds::SubGammaParams;
use crate::defaults;
use crate::distribution::{planted_bias, AliasSampler, DiscretePmf, SampleSeed};
use crate::error::{invalid, Error, Result};
use crate::estimator::{decide, entropy_sample_size, estimate_from_histogram, tester_sample_size};

use super::calibrate::run_calibration;
use super::config::{ExperimentConfig, ExperimentKind};
use super::exact::exact_negcorr_report;
use super::report::{wilson_interval, ReportRow, TrialReport, Z95};

const MAX_SUB_RUNS: u32 = 255;

/// Stream id of one trial: `cell` in the top 24 bits, `sub` in the next 8,
/// `trial` in the low 32.
pub fn stream_id(cell: u64, sub: u32, trial: u64) -> u64 {
    debug_assert!(cell < 1 << 24 && sub <= MAX_SUB_RUNS && trial < 1 << 32);
    (cell << 40) | ((sub as u64) << 32) | trial
}

/// Runs `f` on a pool with `workers` threads, or on the global pool.
pub(crate) fn with_pool<T, F>(workers: Option<usize>, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Validation(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// `q_hat` of every trial in `cell`, in trial order.
pub(crate) fn simulate_q_hats(
    sampler: &AliasSampler,
    n: u64,
    seed: u64,
    cell: u64,
    sub: u32,
    trials: u64,
) -> Result<Vec<f64>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let hist = sampler.histogram(n, SampleSeed::new(seed, stream_id(cell, sub, t)))?;
            Ok(estimate_from_histogram(&hist)?.q_hat)
        })
        .collect()
}

fn count_above(deviations: &[f64], threshold: f64) -> u64 {
    deviations.iter().filter(|&&d| d > threshold).count() as u64
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    cfg.validate()?;
    if cfg.kind != kind {
        return invalid(format!(
            "expected a {} config, got kind {}",
            kind.as_str(),
            cfg.kind.as_str()
        ));
    }
    Ok(())
}

fn required_n(cfg: &ExperimentConfig) -> Result<u64> {
    cfg.n
        .ok_or_else(|| Error::Validation(format!("{} experiments need n", cfg.kind.as_str())))
}

/// Absolute epsilons for a grid, scaled by `q` when the grid is relative.
pub(crate) fn absolute_epsilons(eps: &[f64], relative: bool, q: f64) -> Vec<f64> {
    eps.iter().map(|&e| if relative { e * q } else { e }).collect()
}

/// Empirical `P[|q_hat - Q| > eps]` against the tail envelope, for every eps.
///
/// All epsilons share the same trials.
pub fn run_tail_experiment(cfg: &ExperimentConfig) -> Result<TrialReport> {
    expect_kind(cfg, ExperimentKind::Tail)?;
    let start = Instant::now();
    let n = required_n(cfg)?;
    let pmf = cfg.distribution.build()?;
    let q = pmf.collision_probability();
    let sampler = AliasSampler::new(&pmf)?;
    let q_hats = with_pool(cfg.workers, || simulate_q_hats(&sampler, n, cfg.seed, 0, 0, cfg.trials))??;
    let deviations: Vec<f64> = q_hats.iter().map(|x| (x - q).abs()).collect();
    let params = SubGammaParams::for_estimator(&pmf, n);
    let label = cfg.distribution.label();
    let rows = absolute_epsilons(&cfg.epsilons, cfg.relative_epsilons, q)
        .into_iter()
        .map(|eps| {
            let bound = cfg.envelope.evaluate(eps, params, n);
            ReportRow::frequency(label.clone(), eps, n, cfg.trials, count_above(&deviations, eps), bound)
        })
        .collect();
    Ok(TrialReport::new(cfg, rows, start.elapsed().as_secs_f64()))
}

struct TesterCase {
    label: String,
    pmf: DiscretePmf,
    /// Decision that counts as an error for this case.
    uniform_is_error: bool,
}

fn tester_cases(cfg: &ExperimentConfig, epsilon: f64) -> Result<[TesterCase; 2]> {
    let a = cfg.distribution.build()?;
    let m = a.m();
    let alpha = (2.0 * epsilon).min(1.0);
    Ok([
        TesterCase {
            label: format!("a:{}", cfg.distribution.label()),
            pmf: a,
            uniform_is_error: false,
        },
        TesterCase {
            label: format!("b:planted_bias({m},{alpha})"),
            pmf: planted_bias(m, alpha)?,
            uniform_is_error: true,
        },
    ])
}

fn tester_budget(cfg: &ExperimentConfig, m: usize, epsilon: f64) -> Result<u64> {
    match cfg.n {
        Some(n) => Ok(n),
        None => tester_sample_size(m, epsilon, cfg.delta, cfg.constant.unwrap_or(defaults::TESTER_C)),
    }
}

/// Error rates of the uniformity tester on case (a), the configured
/// distribution, and case (b), `planted_bias(m, min(2 eps, 1))`.
///
/// `n` defaults to [`tester_sample_size`] with the configured or committed
/// constant. A case passes when its upper Wilson bound is at most `delta`.
pub fn run_tester_experiment(cfg: &ExperimentConfig) -> Result<TrialReport> {
    expect_kind(cfg, ExperimentKind::Tester)?;
    let start = Instant::now();
    let mut rows = Vec::new();
    for (ei, &eps) in cfg.epsilons.iter().enumerate() {
        for (ci, case) in tester_cases(cfg, eps)?.into_iter().enumerate() {
            let m = case.pmf.m();
            let n = tester_budget(cfg, m, eps)?;
            let threshold = decide(0.0, m, eps)?.threshold;
            let sampler = AliasSampler::new(&case.pmf)?;
            let cell = 2 * ei as u64 + ci as u64;
            let q_hats = with_pool(cfg.workers, || simulate_q_hats(&sampler, n, cfg.seed, cell, 0, cfg.trials))??;
            let errors = q_hats
                .iter()
                .filter(|&&q| (q <= threshold) == case.uniform_is_error)
                .count() as u64;
            rows.push(ReportRow::frequency(case.label, eps, n, cfg.trials, errors, cfg.delta));
        }
    }
    Ok(TrialReport::new(cfg, rows, start.elapsed().as_secs_f64()))
}

/// Empirical `P[|q_hat - Q| > eps Q]` with `n` from [`entropy_sample_size`]
/// (or the configured `n`), checked against `delta`.
pub fn run_entropy_experiment(cfg: &ExperimentConfig) -> Result<TrialReport> {
    expect_kind(cfg, ExperimentKind::Entropy)?;
    let start = Instant::now();
    let pmf = cfg.distribution.build()?;
    let q = pmf.collision_probability();
    let sampler = AliasSampler::new(&pmf)?;
    let c = cfg.constant.unwrap_or(defaults::ENTROPY_C);
    let mut rows = Vec::new();
    for (ei, &eps) in cfg.epsilons.iter().enumerate() {
        let n = match cfg.n {
            Some(n) => n,
            None => entropy_sample_size(q, eps, cfg.delta, c)?,
        };
        let q_hats = with_pool(cfg.workers, || simulate_q_hats(&sampler, n, cfg.seed, ei as u64, 0, cfg.trials))??;
        let events = q_hats.iter().filter(|&&x| (x - q).abs() > eps * q).count() as u64;
        rows.push(ReportRow::frequency(cfg.distribution.label(), eps, n, cfg.trials, events, cfg.delta));
    }
    Ok(TrialReport::new(cfg, rows, start.elapsed().as_secs_f64()))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

/// Single tester run with budget `N` against the median of `k` runs with
/// `N / k` samples each, on both tester cases.
///
/// The single arm draws exactly the streams of [`run_tester_experiment`], and
/// the median arm's first sub-run shares them, so `k = 1` reproduces the
/// tester experiment. The single-arm row passes when its error rate is at most
/// the median arm's rate plus that arm's Wilson width.
pub fn run_boosting_comparison(cfg: &ExperimentConfig) -> Result<TrialReport> {
    expect_kind(cfg, ExperimentKind::Boosting)?;
    let start = Instant::now();
    let k = cfg.boost_k.unwrap_or(defaults::BOOST_K);
    if k == 0 || k > MAX_SUB_RUNS {
        return invalid(format!("boost_k must lie in 1..={MAX_SUB_RUNS}, got {k}"));
    }
    let mut rows = Vec::new();
    for (ei, &eps) in cfg.epsilons.iter().enumerate() {
        for (ci, case) in tester_cases(cfg, eps)?.into_iter().enumerate() {
            let m = case.pmf.m();
            let budget = tester_budget(cfg, m, eps)?;
            if k as u64 > budget / 2 {
                return invalid(format!("boost_k = {k} exceeds half the budget {budget}"));
            }
            if budget % k as u64 != 0 {
                log::warn!("budget {budget} is not a multiple of k = {k}; each sub-run uses {} samples", budget / k as u64);
            }
            let per_run = budget / k as u64;
            let threshold = decide(0.0, m, eps)?.threshold;
            let sampler = AliasSampler::new(&case.pmf)?;
            let cell = 2 * ei as u64 + ci as u64;
            let is_error = |q: f64| (q <= threshold) == case.uniform_is_error;

            let (single, medians) = with_pool(cfg.workers, || -> Result<(Vec<f64>, Vec<f64>)> {
                let single = simulate_q_hats(&sampler, budget, cfg.seed, cell, 0, cfg.trials)?;
                let medians = (0..cfg.trials)
                    .into_par_iter()
                    .map(|t| {
                        let mut qs = (0..k)
                            .map(|j| {
                                let seed = SampleSeed::new(cfg.seed, stream_id(cell, j, t));
                                Ok(estimate_from_histogram(&sampler.histogram(per_run, seed)?)?.q_hat)
                            })
                            .collect::<Result<Vec<f64>>>()?;
                        Ok(median(&mut qs))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok((single, medians))
            })??;

            let single_errors = single.iter().filter(|&&q| is_error(q)).count() as u64;
            let median_errors = medians.iter().filter(|&&q| is_error(q)).count() as u64;
            let (lo, hi) = wilson_interval(median_errors, cfg.trials, Z95);
            let median_rate = median_errors as f64 / cfg.trials as f64;
            let mut single_row = ReportRow::frequency(format!("{}/single", case.label), eps, budget, cfg.trials, single_errors, 1.0);
            let allowance = median_rate + (hi - lo);
            single_row.bound = Some(allowance);
            single_row.pass = single_row.value <= allowance;
            let mut median_row =
                ReportRow::frequency(format!("{}/median_of_{k}", case.label), eps, per_run, cfg.trials, median_errors, 1.0);
            median_row.bound = None;
            median_row.pass = true;
            rows.push(single_row);
            rows.push(median_row);
        }
    }
    Ok(TrialReport::new(cfg, rows, start.elapsed().as_secs_f64()))
}

/// Dispatches on `cfg.kind`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<TrialReport> {
    match cfg.kind {
        ExperimentKind::Tail => run_tail_experiment(cfg),
        ExperimentKind::Tester => run_tester_experiment(cfg),
        ExperimentKind::Entropy => run_entropy_experiment(cfg),
        ExperimentKind::Negcorr => exact_negcorr_report(cfg),
        ExperimentKind::Calibrate => run_calibration(cfg),
        ExperimentKind::Boosting => run_boosting_comparison(cfg),
    }
}
