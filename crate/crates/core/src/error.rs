use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the crate.
///
/// The variants map onto the CLI exit categories: configuration problems
/// (including invalid numeric input) exit with 2, fit failures with 3 and
/// unphysical models with 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unphysical model: {0}")]
    Unphysical(String),

    #[error("fit failure: {reason} (iterations: {iterations}, residual norm: {residual_norm})")]
    Fit {
        reason: String,
        iterations: usize,
        residual_norm: f64,
    },

    #[error("malformed decay data: {0}")]
    Data(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn unphysical(msg: impl Into<String>) -> Self {
        Error::Unphysical(msg.into())
    }

    pub(crate) fn fit(reason: impl Into<String>, iterations: usize, residual_norm: f64) -> Self {
        Error::Fit {
            reason: reason.into(),
            iterations,
            residual_norm,
        }
    }

    /// Short machine-readable category, printed by the CLI.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) | Error::Config(_) | Error::Data(_) => "config",
            Error::Unphysical(_) => "unphysical",
            Error::Fit { .. } => "fit",
            Error::Io { .. } => "io",
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Config(_) | Error::Data(_) => 2,
            Error::Fit { .. } => 3,
            Error::Unphysical(_) => 4,
            Error::Io { .. } => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
