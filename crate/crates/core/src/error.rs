use thiserror::Error;

use crate::info::OptimizationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported symbol count M = {0} (expected 3 or 4)")]
    UnsupportedSymbolCount(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Blahut-Arimoto ran out of iterations; `best` is the last iterate.
    #[error("capacity iteration did not converge (gap {:.3e} after {} iterations)", best.optimality_gap, best.iterations)]
    NonConvergence { best: Box<OptimizationReport> },

    #[error("quadrature did not reach tolerance {tolerance:e}: estimate {estimate}, error {error:e}")]
    Quadrature {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },

    #[error("no code length reaches the target: cutoff rate {0} is not positive")]
    Unachievable(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
