use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// Every numerical routine either returns a finite value or one of these;
/// NaN is never used as an error signal.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("divergent: {0}")]
    Divergence(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("argument order: {0}")]
    Ordering(String),
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("factorization failed (smallest eigenvalue estimate {min_eigenvalue:e}): {reason}")]
    Factorization { min_eigenvalue: f64, reason: String },
    #[error("non-stationary process: {0}")]
    NonStationary(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Short machine-readable tag, stable across releases.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Pole(_) => "pole",
            Error::Divergence(_) => "divergence",
            Error::NonConvergence(_) => "non-convergence",
            Error::Ordering(_) => "ordering",
            Error::Unsupported(_) => "unsupported",
            Error::PrecisionLoss(_) => "precision-loss",
            Error::Degenerate(_) => "degenerate",
            Error::InsufficientData(_) => "insufficient-data",
            Error::Factorization { .. } => "factorization",
            Error::NonStationary(_) => "non-stationary",
            Error::InvalidSpec(_) => "invalid-spec",
            Error::Format(_) => "format",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Fails with a domain error unless `v` is finite.
pub(crate) fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonConvergence(format!("{what} produced a non-finite value")))
    }
}
