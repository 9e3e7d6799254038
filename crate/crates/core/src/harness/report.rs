use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::TailEnvelope;
use crate::error::{Error, Result};

use super::config::{ExperimentConfig, ExperimentKind};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `events` successes out of `trials`.
///
/// The interval is widened by at most a rounding error so that it always
/// contains the point estimate.
pub fn wilson_interval(events: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0 && events <= trials);
    let n = trials as f64;
    let p = events as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = (center - half).max(0.0).min(p);
    let hi = (center + half).min(1.0).max(p);
    (lo, hi)
}

/// One CSV row: an (epsilon, case) cell or, for covariance checks, one pair of bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub case: String,
    pub epsilon: Option<f64>,
    pub n: u64,
    pub trials: u64,
    pub events: u64,
    /// Empirical frequency, or the exact covariance for `negcorr` rows.
    pub value: f64,
    pub wilson_lo: Option<f64>,
    pub wilson_hi: Option<f64>,
    /// What the row is checked against: envelope, delta, or a covariance ceiling.
    pub bound: Option<f64>,
    pub pass: bool,
}

impl ReportRow {
    /// A Monte Carlo frequency row; passes iff the upper Wilson bound is at most `bound`.
    pub fn frequency(case: impl Into<String>, epsilon: f64, n: u64, trials: u64, events: u64, bound: f64) -> Self {
        let (lo, hi) = wilson_interval(events, trials, Z95);
        Self {
            case: case.into(),
            epsilon: Some(epsilon),
            n,
            trials,
            events,
            value: events as f64 / trials as f64,
            wilson_lo: Some(lo),
            wilson_hi: Some(hi),
            bound: Some(bound),
            pass: hi <= bound,
        }
    }
}

/// Outcome of one experiment run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialReport {
    pub kind: ExperimentKind,
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub wall_clock_secs: f64,
    pub passed: bool,
    pub rows: Vec<ReportRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_envelope: Option<TailEnvelope>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covariance: Option<Vec<Vec<f64>>>,
}

impl TrialReport {
    pub(crate) fn new(cfg: &ExperimentConfig, rows: Vec<ReportRow>, wall_clock_secs: f64) -> Self {
        Self {
            kind: cfg.kind,
            config_hash: cfg.hash(),
            seed: cfg.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_secs,
            passed: rows.iter().all(|r| r.pass),
            rows,
            fitted_envelope: None,
            covariance: None,
        }
    }

    /// Rows as CSV. Contains no timing information, so reruns are byte-identical.
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            writer.serialize(row)?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::Validation(format!("csv flush failed: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `<path>` (CSV) and `<path>` with extension `.json` (summary).
    pub fn write(&self, csv_path: &Path) -> Result<PathBuf> {
        let json_path = csv_path.with_extension("json");
        if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|source| Error::Io {
                path: dir.to_path_buf(),
                source,
            })?;
        }
        for (path, body) in [(csv_path, self.to_csv()?), (json_path.as_path(), self.to_json()?)] {
            std::fs::write(path, body).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
        }
        Ok(json_path)
    }

    /// Human-readable table.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} experiment, seed {}, config {}\n",
            self.kind.as_str(),
            self.seed,
            &self.config_hash[..12]
        );
        out.push_str(&format!(
            "{:<36} {:>12} {:>8} {:>10} {:>12} {:>12} {:>12}  {}\n",
            "case", "epsilon", "n", "events", "value", "wilson_hi", "bound", "pass"
        ));
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.4e}")).unwrap_or_else(|| "-".into());
        for r in &self.rows {
            out.push_str(&format!(
                "{:<36} {:>12} {:>8} {:>10} {:>12.4e} {:>12} {:>12}  {}\n",
                r.case,
                opt(r.epsilon),
                r.n,
                r.events,
                r.value,
                opt(r.wilson_hi),
                opt(r.bound),
                if r.pass { "ok" } else { "FAIL" }
            ));
        }
        if let Some(env) = &self.fitted_envelope {
            out.push_str(&format!(
                "fitted envelope: c_out={} c_sq={} c_lin={} c_heavy={}\n",
                env.c_out, env.c_sq, env.c_lin, env.c_heavy
            ));
        }
        out.push_str(&format!(
            "{} in {:.2}s\n",
            if self.passed { "PASSED" } else { "FAILED" },
            self.wall_clock_secs
        ));
        out
    }
}
