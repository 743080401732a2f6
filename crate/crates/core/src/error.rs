use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested combination of inputs is not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Two fields were combined that do not live on the same grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A quadrature needed by a verification did not converge, so the
    /// verification cannot be decided.
    #[error("unverifiable: quadrature did not converge at t = {t} ({what})")]
    Unverifiable { what: String, t: f64 },

    /// Numerical failure at a specific sample.
    #[error("numeric failure at t = {t}, r = {r}: {what}")]
    Numeric { what: String, t: f64, r: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
