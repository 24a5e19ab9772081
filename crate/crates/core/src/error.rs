//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The circulant spectrum of a target covariance has negative
    /// eigenvalues beyond the clipping tolerance.
    #[error("synthesis failed: {0}")]
    Synthesis(String),

    /// The Gaussian-to-target correlation mapping did not converge.
    #[error("correlation mapping failed: {0}")]
    CorrelationMapping(String),

    /// Too many coincident points for the neighbor estimators.
    #[error("degenerate point set: {0}")]
    Degenerate(String),

    /// A series is too short for the requested embedding or increment.
    #[error("length error: {0}")]
    Length(String),

    /// A covariance matrix is not positive definite.
    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
