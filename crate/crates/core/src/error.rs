use thiserror::Error;

/// Errors raised by the geometric constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    /// A point (or a path/trajectory) left the region where a structure is defined.
    #[error("domain error at {point}: {reason}")]
    Domain { point: String, reason: String },

    /// Malformed input: wrong valence, dimension mismatch, unknown identifier.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A step-doubling error estimate exceeded its threshold.
    #[error("integration accuracy {estimate:.3e} exceeds {tolerance:.1e}")]
    Accuracy { estimate: f64, tolerance: f64 },

    /// Invalid suite configuration.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

impl GeomError {
    pub fn domain(point: impl std::fmt::Display, reason: impl Into<String>) -> Self {
        GeomError::Domain {
            point: point.to_string(),
            reason: reason.into(),
        }
    }

    pub fn argument(msg: impl Into<String>) -> Self {
        GeomError::Argument(msg.into())
    }
}
