use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("{function} is undefined at x = {x}")]
    Domain { function: &'static str, x: f64 },

    /// Adaptive quadrature ran out of subdivisions. The partial value and its
    /// error estimate are kept so callers can still decide what to do.
    #[error("quadrature did not converge: value {value:e} with estimated error {abs_error:e} after {subdivisions} subdivisions")]
    NotConverged {
        value: f64,
        abs_error: f64,
        subdivisions: usize,
    },

    #[error("integrand is not finite at x = {x}")]
    NonFiniteIntegrand { x: f64 },

    #[error("time-switching fraction of 1 leaves no time to relay")]
    DegenerateSplit,

    #[error("integral constants are degenerate (c = 0): the relay harvests no energy")]
    DegenerateConstants,

    #[error("{0}")]
    Unsupported(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
