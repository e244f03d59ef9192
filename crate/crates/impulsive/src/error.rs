use thiserror::Error;

use crate::space::SpaceId;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by simulation, estimation and quotient routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("points belong to different spaces: {0} and {1}")]
    SpaceMismatch(SpaceId, SpaceId),

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("outside domain: {0}")]
    Domain(String),

    /// The crossing function touched zero without changing sign. Hits of
    /// this kind are excluded by the transversality hypotheses, so meeting
    /// one means the system definition is bad; it is never skipped silently.
    #[error("grazing contact near t = {t}: crossing touches zero without a sign change")]
    Grazing { t: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An internal consistency bound was violated (e.g. impulse times
    /// accumulating faster than the admissibility gap allows).
    #[error("inconsistent system: {0}")]
    Inconsistent(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
