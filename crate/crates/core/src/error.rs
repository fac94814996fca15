use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong inside the core pipeline.
///
/// Row positions are zero-based indices into the series that was passed in;
/// IO layers translate them into file line numbers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,
    #[error("series too short: need at least {needed} rows, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("non-positive price at row {index}")]
    NonPositivePrice { index: usize },
    #[error("OHLC invariant violated at row {index}")]
    OhlcInvariantViolation { index: usize },
    #[error("timestamp at row {index} does not strictly increase")]
    NonMonotonicTimestamp { index: usize },
    #[error("non-finite or negative value in field `{field}` at row {index}")]
    InvalidValue { field: &'static str, index: usize },
    #[error("window {window} is larger than the series length {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("invalid window for {name}: {window} (must be >= 2)")]
    InvalidWindow { name: &'static str, window: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no risk-free yield on or before day {day}")]
    NoPriorYield { day: i32 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("insufficient data: need at least {needed} rows, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("model has no out-of-bag bookkeeping")]
    ModelNotFitted,
    #[error("target has zero variance")]
    ZeroVariance,
    #[error("deviation is zero")]
    ZeroDeviation,
    #[error("maximum drawdown is zero")]
    ZeroDrawdown,
    #[error("returns sum to zero")]
    ZeroSum,
    #[error("tail is empty")]
    EmptyTail,
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("{signals} signals for {bars} bars")]
    MisalignedSignals { bars: usize, signals: usize },
    #[error("unknown indicator `{0}`")]
    UnknownIndicator(String),
    #[error("duplicate model name `{0}`")]
    DuplicateModel(String),
}
