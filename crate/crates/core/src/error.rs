use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("prediction {index} is {value}, outside the open interval (0, 1)")]
    PredictionOutOfRange { index: usize, value: String },

    #[error("row {row} sums to {sum}, not 1")]
    RowNotNormalized { row: usize, sum: String },

    #[error("class {class} at position {index} is outside 1..={classes}")]
    ClassOutOfRange {
        index: usize,
        class: usize,
        classes: usize,
    },

    #[error("invalid labeling: {0}")]
    InvalidLabeling(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} size {requested} exceeds the configured limit {limit}")]
    SizeGuard {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0} is not in the twin prime table")]
    NotInTable(u64),

    #[error("score was not produced by this construction: {0}")]
    Decode(String),

    #[error("insufficient precision: residual {residual} exceeds 1/4")]
    InsufficientPrecision { residual: String },

    #[error("no injective batch vector found for b = {batch}, phi = {phi} within budget {budget}")]
    SearchExhausted { batch: usize, phi: u32, budget: usize },

    #[error("vector of length {batch} is not injective at phi = {phi}")]
    NotInjective { batch: usize, phi: u32 },

    #[error("batch size {batch} cannot be injective at phi = {phi}: 2^b exceeds 10^phi (10^phi + 1)")]
    PigeonholeViolation { batch: usize, phi: u32 },

    #[error("lookup miss: oracle answer ({auc}, {ll}) matches no labeling")]
    LookupMiss { auc: String, ll: String },

    #[error("oracle error: {0}")]
    Oracle(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
