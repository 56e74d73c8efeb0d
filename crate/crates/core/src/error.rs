use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field shape mismatch: {0}")]
    Shape(String),

    #[error("spectral data is not Hermitian: imaginary residue {residue:.3e} relative to {scale:.3e}")]
    NotHermitian { residue: f64, scale: f64 },

    #[error("backward heat flow (tau*eta = {0:e}) requires an amplification cap")]
    BackwardHeat(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("solver aborted at t = {t:.6e} after {steps} steps: {reason}")]
    BlowUp { t: f64, steps: usize, reason: String },

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("config error at line {line}, column {column}: {message}")]
    ConfigSyntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("not a snapshot: {0}")]
    NotSnapshot(String),

    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors that stem from user configuration rather than a run.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::InvalidGrid(_)
                | Error::InvalidParameter(_)
                | Error::ConfigSyntax { .. }
                | Error::Config(_)
                | Error::UnknownStrategy { .. }
        )
    }
}
