use std::path::PathBuf;

/// Errors from file handling and run orchestration. Library errors from the
/// core crate pass through as [`Error::Core`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: {reason}")]
    UnparseableRow { line: usize, reason: String },
    #[error("line {line}: timestamp does not increase")]
    NonMonotonicTimestamp { line: usize },
    #[error("line {line}: OHLC prices out of order")]
    OhlcInvariantViolation { line: usize },
    #[error("line {line}: price must be positive")]
    NonPositivePrice { line: usize },
    #[error("input has no data rows")]
    EmptyInput,
    #[error("run directory {path} is incomplete: {missing} not found")]
    IncompleteRun { path: PathBuf, missing: String },
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("model `{model}`: {source}")]
    Model {
        model: String,
        source: barforest_core::Error,
    },
    #[error(transparent)]
    Core(#[from] barforest_core::Error),
}

impl Error {
    /// Stable identifier used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MissingColumn(_) => "missing_column",
            Error::UnparseableRow { .. } => "unparseable_row",
            Error::NonMonotonicTimestamp { .. } => "non_monotonic_timestamp",
            Error::OhlcInvariantViolation { .. } => "ohlc_invariant_violation",
            Error::NonPositivePrice { .. } => "non_positive_price",
            Error::EmptyInput => "empty_input",
            Error::IncompleteRun { .. } => "incomplete_run",
            Error::UnknownModel(_) => "unknown_model",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
            Error::Model { .. } => "model",
            Error::Core(_) => "core",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
