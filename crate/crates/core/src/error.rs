use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument or input object violated a documented precondition.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A numeric function was evaluated outside of its domain.
    #[error("argument {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },

    /// A tail bound was requested for a variable with zero variance and zero scale.
    #[error("degenerate distribution: v2 = b = 0 gives no tail bound for t > 0")]
    DegenerateDistribution,

    /// The sample contained no collisions, so -log(q_hat) is undefined.
    #[error("estimate undefined: sample has no collisions; increase n")]
    NoCollisions,

    /// Root bracketing failed in a monotone solver.
    #[error("could not bracket the root after {expansions} expansions")]
    Bracket { expansions: u32 },

    /// Constant fitting found a cell that no positive constant satisfies.
    #[error("calibration failed: no feasible constants for cell {cell}")]
    Calibration { cell: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
