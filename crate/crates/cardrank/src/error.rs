//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("line {line}: {reason}")]
    ParseLine { line: usize, reason: String },

    #[error("invalid QPV {qpv_id}: {reason}")]
    InvalidQpv { qpv_id: String, reason: String },

    #[error("session {session_id}: two QPVs share timestamp {timestamp_ms}; ordering undefined")]
    TimestampTie { session_id: String, timestamp_ms: i64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("line {line}: unknown judgment grade {grade:?}")]
    UnknownGrade { line: usize, grade: String },

    #[error("query mismatch: expected {expected:?}, got {found:?}")]
    QueryMismatch { expected: String, found: String },

    #[error("labels mix strategies {first:?} and {second:?}; one strategy per training set")]
    MixedStrategies { first: String, second: String },

    #[error("card type {0:?} is not in the feature index universe")]
    UnknownCard(String),

    #[error("query {0:?} is not in the ground truth")]
    UnknownQuery(String),

    #[error("no prediction for QPV {0}")]
    MissingPrediction(String),

    #[error("candidate card set is empty")]
    EmptyCandidates,

    #[error(
        "full enumeration of {num_cards} cards is infeasible (O(2^K) candidate lists, cap {cap}); \
         supply explicit candidate lists"
    )]
    ListwiseTooLarge { num_cards: usize, cap: usize },

    #[error("feature vector has width {found}, model was trained on width {expected}")]
    FeatureWidthMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
