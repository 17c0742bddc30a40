use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("field is not real: max imaginary part {0:e}")]
    NotReal(f64),
    #[error("negative-order operator applied to a field with nonzero mean ({0:e})")]
    NegativeOrderOnNonzeroMean(f64),
    #[error("unsupported exponents: {0}")]
    UnsupportedExponents(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("implicit solve is singular at mode {mode} (pivot {pivot:e})")]
    SolveSingular { mode: usize, pivot: f64 },
    #[error("blow-up at t = {t}: H3 norm {norm:e} exceeds ceiling {ceiling:e}")]
    BlowUp { t: f64, norm: f64, ceiling: f64 },
    #[error("decay fit failed: {0}")]
    Fit(String),
    #[error("invalid configuration: {}", format_violations(.0))]
    Config(Vec<Violation>),
    #[error("could not parse configuration: {0}")]
    ConfigParse(String),
    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| format!("{}: {}", x.field, x.message))
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::ConfigParse(_)
            | Error::InvalidGrid(_)
            | Error::InvalidParameter(_)
            | Error::UnsupportedExponents(_) => 1,
            Error::Io { .. } | Error::Checkpoint { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
