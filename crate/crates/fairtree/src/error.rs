//! Crate-wide error type.

use thiserror::Error;

/// Errors produced anywhere in the pipeline.
///
/// Variants are grouped by the stage that raises them; the CLI maps them
/// onto exit codes via [`Error::exit_class`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row}: expected {expected} columns, found {found}")]
    MalformedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column {column}: cannot parse {value:?}")]
    InvalidField {
        row: usize,
        column: String,
        value: String,
    },

    #[error("header mismatch at column {index}: expected {expected:?}, found {found:?}")]
    HeaderMismatch {
        index: usize,
        expected: String,
        found: String,
    },

    #[error(
        "participant {participant}, instrument {instrument}, question {question}: \
         answer {value} outside [{min}, {max}]"
    )]
    AnswerOutOfRange {
        participant: String,
        instrument: String,
        question: usize,
        value: i64,
        min: i64,
        max: i64,
    },

    #[error("instrument {name}: {reason}")]
    BadInstrument { name: String, reason: String },

    #[error("instrument {instrument}: every answer is absent")]
    AllAnswersAbsent { instrument: String },

    #[error("instrument {instrument}: expected {expected} answers, found {found}")]
    AnswerCountMismatch {
        instrument: String,
        expected: usize,
        found: usize,
    },

    #[error("requested {requested} positive rows but only {available} are available")]
    NotEnoughPositives { requested: usize, available: usize },

    #[error("stratum {stratum} has no rows")]
    EmptyStratum { stratum: String },

    #[error("cannot build {k} folds from {rows} rows")]
    BadFoldCount { k: usize, rows: usize },

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("grid dimension {dimension} is empty")]
    EmptyGridDimension { dimension: &'static str },

    #[error("input length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("group {group} has no rows")]
    EmptyGroup { group: String },

    #[error("need at least two groups, found {found}")]
    TooFewGroups { found: usize },

    #[error("{rate} undefined for group {group}")]
    UndefinedRate { group: String, rate: &'static str },

    #[error("group {group} contains a single class; cannot fit equalized odds")]
    OneClassGroup { group: String },

    #[error("group {group} not covered by the policy")]
    UnknownGroup { group: String },

    #[error("sample {which} has {len} values; need at least 2")]
    SampleTooSmall { which: &'static str, len: usize },

    #[error("{what} is zero; cannot divide")]
    ZeroDenominator { what: &'static str },

    #[error("configuration: {0}")]
    Config(String),

    #[error("trial {trial} failed at stage {stage}: {source}")]
    Trial {
        trial: usize,
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("TOML: {0}")]
    Toml(#[from] toml::de::Error),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    /// Bad flags or unusable configuration.
    Usage,
    /// Malformed or inconsistent input data.
    Data,
    /// A numerical precondition failed (degenerate samples, zero denominators).
    Numerical,
}

impl Error {
    pub fn exit_class(&self) -> ExitClass {
        match self {
            Error::Config(_) => ExitClass::Usage,
            Error::SampleTooSmall { .. } | Error::ZeroDenominator { .. } => ExitClass::Numerical,
            Error::Trial { source, .. } => source.exit_class(),
            _ => ExitClass::Data,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
