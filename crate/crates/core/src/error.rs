use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QnmError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    #[error("degenerate horizon at r = {radius}: |F'(r)| = {slope:e}")]
    DegenerateHorizon { radius: f64, slope: f64 },
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("contour left domain of analyticity: {0}")]
    ContourLeftDomain(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
}

pub type Result<T> = std::result::Result<T, QnmError>;
