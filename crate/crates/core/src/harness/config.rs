use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::TailEnvelope;
use crate::defaults;
use crate::distribution::DistributionSpec;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Tail,
    Tester,
    Entropy,
    Negcorr,
    Calibrate,
    Boosting,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Tail => "tail",
            ExperimentKind::Tester => "tester",
            ExperimentKind::Entropy => "entropy",
            ExperimentKind::Negcorr => "negcorr",
            ExperimentKind::Calibrate => "calibrate",
            ExperimentKind::Boosting => "boosting",
        }
    }
}

/// One (distribution, n, epsilon grid) cell family used by calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub distribution: DistributionSpec,
    pub n: u64,
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub relative_epsilons: bool,
}

/// Declarative experiment description, read from JSON.
///
/// ```json
/// {
///   "kind": "tail",
///   "distribution": {"family": "uniform", "m": 100},
///   "n": 2000,
///   "epsilons": [0.002, 0.004],
///   "relative_epsilons": true,
///   "trials": 10000,
///   "seed": 1
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub distribution: DistributionSpec,
    /// Sample size. Tester, entropy and boosting runs derive it from the
    /// sample-size rules when absent.
    #[serde(default)]
    pub n: Option<u64>,
    #[serde(default)]
    pub epsilons: Vec<f64>,
    /// Multiply every epsilon by the true collision probability.
    #[serde(default)]
    pub relative_epsilons: bool,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "defaults::tail_envelope")]
    pub envelope: TailEnvelope,
    /// Sample-size constant for tester/entropy/boosting runs.
    #[serde(default)]
    pub constant: Option<f64>,
    /// Number of sub-runs in the median arm of a boosting comparison.
    #[serde(default)]
    pub boost_k: Option<u32>,
    /// Extra cell families for calibration; the top-level fields form the first one.
    #[serde(default)]
    pub cases: Vec<CaseSpec>,
    /// Worker threads; `None` uses the global rayon pool. Never affects results.
    #[serde(default)]
    pub workers: Option<usize>,
    /// CSV output path; the JSON summary goes next to it with a `.json` extension.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_delta() -> f64 {
    0.1
}

impl ExperimentConfig {
    /// A config with defaults for everything except the required fields.
    pub fn new(kind: ExperimentKind, distribution: DistributionSpec, trials: u64, seed: u64) -> Self {
        Self {
            kind,
            distribution,
            n: None,
            epsilons: Vec::new(),
            relative_epsilons: false,
            delta: default_delta(),
            trials,
            seed,
            envelope: defaults::tail_envelope(),
            constant: None,
            boost_k: None,
            cases: Vec::new(),
            workers: None,
            out: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.trials >= 1 << 32 {
            return invalid("trials must be below 2^32");
        }
        let needs_epsilons = !matches!(self.kind, ExperimentKind::Negcorr);
        if needs_epsilons && self.epsilons.is_empty() {
            return invalid(format!("{} experiments need a non-empty epsilon grid", self.kind.as_str()));
        }
        check_grid(&self.epsilons)?;
        for case in &self.cases {
            check_grid(&case.epsilons)?;
            if case.epsilons.is_empty() {
                return invalid("calibration cases need a non-empty epsilon grid");
            }
            if case.n < 2 {
                return invalid("calibration cases need n >= 2");
            }
        }
        if let Some(n) = self.n {
            if n < 2 {
                return invalid(format!("n must be at least 2, got {n}"));
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return invalid(format!("delta must lie in (0,1), got {}", self.delta));
        }
        if let Some(c) = self.constant {
            if !(c > 0.0) || !c.is_finite() {
                return invalid(format!("constant must be finite and > 0, got {c}"));
            }
        }
        if self.workers == Some(0) {
            return invalid("workers must be at least 1");
        }
        self.envelope.validate()
    }

    /// Hex SHA-256 of the canonical JSON encoding, ignoring `workers` and `out`.
    pub fn hash(&self) -> String {
        let stripped = Self {
            workers: None,
            out: None,
            ..self.clone()
        };
        let canonical = serde_json::to_string(&stripped).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

fn check_grid(eps: &[f64]) -> Result<()> {
    if eps.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return invalid("epsilon grid must be strictly positive and finite");
    }
    if eps.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("epsilon grid must be strictly increasing");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::from_json(
            r#"{"kind":"tail","distribution":{"family":"uniform","m":100},
                "n":2000,"epsilons":[0.001,0.002],"trials":10,"seed":3}"#,
        )
        .unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Tail);
        assert_eq!(cfg.delta, 0.1);
        assert_eq!(cfg.envelope, defaults::tail_envelope());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn rejects_bad_grids_and_counts() {
        let base = ExperimentConfig {
            epsilons: vec![0.1, 0.2],
            ..ExperimentConfig::new(ExperimentKind::Tail, DistributionSpec::Uniform { m: 4 }, 10, 0)
        };
        assert!(base.validate().is_ok());
        let mut c = base.clone();
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.epsilons = vec![0.2, 0.1];
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.epsilons = vec![0.0, 0.1];
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.epsilons.clear();
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.delta = 1.0;
        assert!(c.validate().is_err());
        let mut c = base;
        c.workers = Some(0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = ExperimentConfig::from_json(
            r#"{"kind":"tail","distribution":{"family":"uniform","m":4},
                "epsilons":[0.1],"trials":1,"seed":0,"bogus":1}"#,
        );
        assert!(err.is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig {
            epsilons: vec![0.1],
            ..ExperimentConfig::new(ExperimentKind::Tail, DistributionSpec::Uniform { m: 4 }, 10, 0)
        };
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.workers = Some(8);
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
    }
}
