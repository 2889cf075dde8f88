use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the space models, analyzers and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("model mismatch: expected {expected}, found {found}")]
    ModelMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("cardinality cap of {cap} points exceeded while {context}")]
    CapExceeded { cap: usize, context: String },

    #[error("invalid letter {0:?}; expected one of a, A, b, B")]
    InvalidLetter(char),

    #[error("invalid point {text:?}: {reason}")]
    InvalidPoint { text: String, reason: String },

    #[error("radius must be a non-negative finite number, got {0}")]
    NegativeRadius(f64),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("prefix {0:?} is not reduced")]
    UnreducedPrefix(String),

    #[error("common prefix runs past both truncations; Gromov product is at least {lower_bound}")]
    PrecisionExhausted { lower_bound: usize },

    #[error("precision mismatch: {left} vs {right}")]
    PrecisionMismatch { left: usize, right: usize },

    #[error("insufficient precision: need {needed} bits, have {available}")]
    InsufficientPrecision { needed: usize, available: usize },

    #[error("height {0} is not on the cone grid")]
    OffGrid(f64),

    #[error("base graph is disconnected")]
    DisconnectedBase,

    #[error("invalid base graph: {0}")]
    InvalidBaseGraph(String),

    #[error("invalid lambda function: {0}")]
    InvalidLambda(String),

    #[error("lambda is not flagged increasing and unbounded; the compactification criterion does not apply")]
    LambdaNotIncreasingUnbounded,

    #[error("isometry violated: d({src}, {dst}) = {before} but images are at distance {after}")]
    IsometryViolation {
        src: String,
        dst: String,
        before: f64,
        after: f64,
    },

    #[error("window radius {window} must exceed the largest ball radius {largest_ball}")]
    WindowTooSmall { window: f64, largest_ball: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn cap(cap: usize, context: impl Into<String>) -> Self {
        Error::CapExceeded {
            cap,
            context: context.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
