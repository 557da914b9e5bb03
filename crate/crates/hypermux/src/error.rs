//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model or configuration parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The input data cannot support the requested computation
    /// (e.g. all degrees equal, a single-class score set, an empty pair set).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A ratio whose denominator vanished (e.g. edge overlap with an
    /// edgeless layer).
    #[error("undefined value: {0}")]
    Undefined(String),

    /// Adaptive quadrature did not reach the requested tolerance within the
    /// evaluation budget; `achieved` is the error estimate at interruption.
    #[error("quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e} after {evals} evaluations")]
    QuadratureNonConvergence {
        achieved: f64,
        requested: f64,
        evals: usize,
    },

    /// Rejection sampling produced no accepted draws within its budget.
    #[error("rejection sampling starved: {0}")]
    RejectionStarved(String),

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// A node id named in one file is missing from or unknown to another.
    #[error("node id mismatch: {0}")]
    IdMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
