//! Reproducible Monte Carlo and exact-enumeration experiments.
//!
//! Every trial draws from its own ChaCha8 stream, addressed by
//! `(master seed, cell, sub-run, trial)`. Trials run on a rayon pool and
//! results are collected in trial order, so a report depends only on its
//! config and never on the number of workers.

mod calibrate;
mod config;
mod exact;
mod experiments;
mod report;

pub use calibrate::{
    calibrate_constants, calibration_cells, fit_bin_moment_constant, fit_envelope, run_calibration,
    BinMomentCell, CalibrationCell, GRID_STEP,
};
pub use config::{CaseSpec, ExperimentConfig, ExperimentKind};
pub use exact::{exact_estimator_moments, exact_negcorr_report, run_negcorr_check, MAX_ENUMERATION};
pub use experiments::{
    run_boosting_comparison, run_entropy_experiment, run_experiment, run_tail_experiment,
    run_tester_experiment, stream_id,
};
pub use report::{wilson_interval, ReportRow, TrialReport, Z95};
