use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the placement library.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the domain of a formula (e.g. a link of zero length).
    #[error("domain error: {0}")]
    Domain(String),

    /// A value object violated one of its invariants.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("quadrature did not converge: error estimate {achieved:.3e} exceeds {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("altitude bracket not found below normalized altitude {cap:e}")]
    Bracket { cap: f64 },

    #[error("optimal radius diverges for zero user density")]
    ZeroDensity,

    #[error("infeasible learning budget: {0}")]
    Infeasible(String),

    #[error("length mismatch: {0} origins vs {1} destinations")]
    LengthMismatch(usize, usize),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }

    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::Bracket { .. } | Error::ZeroDensity
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
