//! Concentration bounds for the collision estimator.
//!
//! Tail bounds here are expressed through a variance factor `v2` and a scale
//! `b` (a sub-gamma pair). The estimator's tail envelope is
//!
//! ```text
//! P[|q_hat - Q| > eps] <= c_out * exp(-min(c_sq eps^2/v2, c_lin eps/b, c_heavy n sqrt(eps)))
//! v2 = Q/n^2 + sum_x p_x^3 / n
//! b  = max_x p_x / n
//! ```
//!
//! The constants are not known in closed form; [`TailEnvelope`] carries them
//! explicitly and the harness fits them against Monte Carlo data.

use serde::{Deserialize, Serialize};

use crate::distribution::DiscretePmf;
use crate::error::{invalid, Error, Result};
use crate::moments::MomentTable;

/// Variance factor and scale of a sub-gamma variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubGammaParams {
    pub v2: f64,
    pub b: f64,
}

impl SubGammaParams {
    pub fn new(v2: f64, b: f64) -> Result<Self> {
        if !(v2 >= 0.0 && b >= 0.0) || !v2.is_finite() || !b.is_finite() {
            return invalid(format!("sub-gamma parameters must be finite and >= 0, got v2={v2}, b={b}"));
        }
        Ok(Self { v2, b })
    }

    /// The estimator's parameters for `n` draws from `pmf`.
    pub fn for_estimator(pmf: &DiscretePmf, n: u64) -> Self {
        Self {
            v2: variance_proxy(pmf, n),
            b: scale_param(pmf, n),
        }
    }
}

/// Constants of the estimator's tail envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEnvelope {
    pub c_out: f64,
    pub c_sq: f64,
    pub c_lin: f64,
    pub c_heavy: f64,
}

impl Default for TailEnvelope {
    fn default() -> Self {
        Self {
            c_out: 2.0,
            c_sq: 0.25,
            c_lin: 0.25,
            c_heavy: 0.25,
        }
    }
}

impl TailEnvelope {
    pub fn new(c_out: f64, c_sq: f64, c_lin: f64, c_heavy: f64) -> Result<Self> {
        let env = Self {
            c_out,
            c_sq,
            c_lin,
            c_heavy,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.c_out, self.c_sq, self.c_lin, self.c_heavy];
        if all.iter().any(|c| !(*c > 0.0) || !c.is_finite()) {
            return invalid(format!("envelope constants must be finite and > 0, got {self:?}"));
        }
        Ok(())
    }

    /// The three exponent branches before taking the minimum.
    pub fn branches(&self, epsilon: f64, params: SubGammaParams, n: u64) -> [f64; 3] {
        let quad = if params.v2 > 0.0 {
            self.c_sq * epsilon * epsilon / params.v2
        } else {
            f64::INFINITY
        };
        let lin = if params.b > 0.0 {
            self.c_lin * epsilon / params.b
        } else {
            f64::INFINITY
        };
        let heavy = self.c_heavy * n as f64 * epsilon.sqrt();
        [quad, lin, heavy]
    }

    /// Envelope value for explicit sub-gamma parameters, clamped to `[0, 1]`.
    pub fn evaluate(&self, epsilon: f64, params: SubGammaParams, n: u64) -> f64 {
        if !(epsilon > 0.0) {
            return 1.0;
        }
        let exponent = self
            .branches(epsilon, params, n)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        (self.c_out * (-exponent).exp()).clamp(0.0, 1.0)
    }
}

/// `v2 = Q/n^2 + sum_x p_x^3 / n`.
pub fn variance_proxy(pmf: &DiscretePmf, n: u64) -> f64 {
    let n = n as f64;
    pmf.collision_probability() / (n * n) + pmf.power_sum(3) / n
}

/// `b = max_x p_x / n`.
pub fn scale_param(pmf: &DiscretePmf, n: u64) -> f64 {
    pmf.max_prob() / n as f64
}

/// `2 exp(-t^2 / (2 (v2 + b t)))`, clamped to `[0, 2]`.
pub fn subgamma_tail(t: f64, params: SubGammaParams) -> Result<f64> {
    if !(t >= 0.0) {
        return invalid(format!("tail threshold must be >= 0, got {t}"));
    }
    if t == 0.0 {
        return Ok(2.0);
    }
    let denom = params.v2 + params.b * t;
    if denom <= 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    Ok((2.0 * (-t * t / (2.0 * denom)).exp()).clamp(0.0, 2.0))
}

/// Parameters of a sum of independent (or negatively dependent) sub-gamma
/// terms: variance factors add, the scale is the largest one.
pub fn aggregate_subgamma(components: &[SubGammaParams]) -> Result<SubGammaParams> {
    if components.is_empty() {
        return invalid("cannot aggregate an empty set of components");
    }
    Ok(SubGammaParams {
        v2: components.iter().map(|c| c.v2).sum(),
        b: components.iter().map(|c| c.b).fold(0.0, f64::max),
    })
}

/// Tail envelope for the estimator with `n` draws from `pmf`.
pub fn estimator_tail_envelope(epsilon: f64, pmf: &DiscretePmf, n: u64, env: &TailEnvelope) -> f64 {
    env.evaluate(epsilon, SubGammaParams::for_estimator(pmf, n), n)
}

/// Checks `(E|Z|^d)^(1/d) <= C (sqrt(d) v + d b)` for every order in the table.
pub fn moment_subgamma_check(moments: &MomentTable, v: f64, b: f64, c: f64) -> Result<bool> {
    if let Some(d) = moments.orders().find(|d| d % 2 == 1) {
        return invalid(format!("moment table contains odd order {d}"));
    }
    Ok(moments.iter().all(|(d, m)| {
        let d = d as f64;
        m.powf(1.0 / d) <= c * (d.sqrt() * v + d * b)
    }))
}
