//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside a function's mathematical domain.
    #[error("domain error in {context}: {message}")]
    Domain { context: &'static str, message: String },

    /// A series exhausted its term budget before the stopping rule fired.
    #[error("series for {context} did not converge within {max_terms} terms")]
    NonConvergence { context: &'static str, max_terms: usize },

    /// A moment that is infinite for the requested parameters (beta <= -delta/2).
    #[error("moment of order {beta_tilde} is infinite for dimension {delta}")]
    InfiniteMoment { beta_tilde: f64, delta: f64 },

    /// Proposition domain condition violated (beta = 1 + nu - alpha must be > 0).
    #[error("domain condition violated: beta = {beta} <= 0 (alpha = {alpha}, nu = {nu})")]
    DomainCondition { beta: f64, alpha: f64, nu: f64 },

    /// A model-parameter inequality failed, named so callers can report it.
    #[error("parameter constraint violated: {constraint} (got {detail})")]
    ConstraintViolation { constraint: &'static str, detail: String },

    /// Invalid run configuration (path counts, step counts, tolerances ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Malformed or degenerate input data.
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A computation produced a non-finite or sign-inconsistent result.
    #[error("numerical instability in {context}: {message}")]
    Numerical { context: &'static str, message: String },
}

impl Error {
    pub(crate) fn domain(context: &'static str, message: impl Into<String>) -> Self {
        Error::Domain { context, message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
