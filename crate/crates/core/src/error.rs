use thiserror::Error;

use crate::poly::RemezResult;

/// Errors produced by the estimators, the approximation kernel and the
/// input parsers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A degree or size exceeds a supported cap.
    #[error("bounds error: {what} = {value} exceeds the cap {cap}")]
    Bounds {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    /// Remez exchange ran out of iterations; the best iterate is attached.
    #[error("remez did not converge in {iterations} iterations (relative gap {gap:.3e})")]
    Convergence {
        iterations: usize,
        gap: f64,
        best: Box<RemezResult>,
    },

    /// A linear solve broke down.
    #[error("numerical error: {message} (condition estimate {condition:.3e})")]
    Numerical { message: String, condition: f64 },

    /// The estimator is not defined on this input.
    #[error("estimator undefined: {0}")]
    Undefined(&'static str),

    /// Malformed input file or stream.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input error: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
