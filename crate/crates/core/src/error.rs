use thiserror::Error;

use crate::model::RegimeReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spectral profile: {0}")]
    InvalidProfile(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("quadrature grid too coarse: spacing {spacing} exceeds the allowed {required}")]
    Resolution { spacing: f64, required: f64 },

    #[error("configuration is outside the multipath regime")]
    RegimeViolation(Box<RegimeReport>),

    #[error("visibility undefined: scan maximum plus minimum is {0}")]
    UndefinedVisibility(f64),

    #[error("detector count {n} exceeds the permutation-sum limit of {max}")]
    ComplexityLimit { n: usize, max: usize },

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 3,
            _ => 2,
        }
    }
}
