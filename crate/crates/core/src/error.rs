use thiserror::Error;

/// Errors raised by the selection algorithms, ratio analysis and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation
    /// (out-of-range index, duplicate element, overlapping sets, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid algorithm or experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// An exhaustive enumeration would exceed its budget.
    #[error("resource limit exceeded: {what} (limit {limit})")]
    Resource { what: String, limit: u64 },

    /// The data cannot support the requested quantity (zero column, zero response, f(S) = 0).
    #[error("degenerate data: {0}")]
    Degenerate(String),

    /// The inner support solver did not reach its gradient tolerance.
    #[error("inner solver did not converge after {iterations} iterations (restricted gradient norm {gradient_norm:e})")]
    Convergence { iterations: usize, gradient_norm: f64 },

    /// A metric is undefined for the given input (e.g. AUROC without negatives).
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn resource(what: impl Into<String>, limit: u64) -> Self {
        Error::Resource { what: what.into(), limit }
    }
}
