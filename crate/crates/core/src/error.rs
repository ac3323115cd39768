use thiserror::Error;

use crate::engine::ProductEval;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// The engine saw log-terms that do not decay like 1/k². The partial
    /// evaluation at the last completed stage is carried along.
    #[error("divergence suspected after {} terms (partial log-value {})", .0.terms_used, .0.log_value)]
    DivergenceSuspected(Box<ProductEval>),

    #[error("{what} overflows binary64 (log-value {log_value})")]
    Overflow { what: &'static str, log_value: f64 },

    #[error("invalid truncation policy: {0}")]
    Policy(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }
}
