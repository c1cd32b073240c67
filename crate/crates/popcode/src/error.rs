use thiserror::Error;

/// Errors produced by the simulation, fitting and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Weighted-average decoding of an all-zero response has no defined value.
    #[error("undefined estimate: weighted average of an all-zero population response")]
    UndefinedEstimate,

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("mismatched binning: distributions do not share bin layout")]
    MismatchedBinning,

    /// A configuration that cannot produce usable output (e.g. a cognition
    /// vector whose responses are almost surely all zero).
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for validation-class errors,
    /// 3 for runtime failures. Usage errors (code 1) are handled by the
    /// argument parser before an `Error` exists.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::UndefinedEstimate
            | Error::InvalidPrior(_)
            | Error::MismatchedBinning
            | Error::Validation(_)
            | Error::Parse { .. } => 2,
            Error::DegenerateConfiguration(_) | Error::Io(_) | Error::Json(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
