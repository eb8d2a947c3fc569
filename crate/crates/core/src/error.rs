use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter y = {y} outside the family domain: {reason}")]
    Parameter { y: f64, reason: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not converge ({context}); residual estimate {residual:e}")]
    Quadrature { context: String, residual: f64 },
    #[error("Laplace inversion failed at t = {t}: {reason}")]
    Inversion { t: f64, reason: String },
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("path horizon {horizon} exhausted before sigma exceeded t = {t}")]
    Horizon { horizon: f64, t: f64 },
    #[error("shape mismatch: expected {expected} samples, got {got}")]
    Shape { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the failure is numerical (as opposed to a violated assumption or bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::Inversion { .. } | Error::Horizon { .. }
        )
    }
}
