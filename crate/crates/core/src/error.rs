use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("invalid data: {0}")]
    Data(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("zero-length path: normalization and direction are undefined")]
    ZeroLengthPath,

    #[error("vertex {0} is not in the graph")]
    UnknownVertex(usize),

    #[error("vertex {to} is unreachable from vertex {from}")]
    Unreachable { from: usize, to: usize },

    #[error("no alternative-class vertex is reachable from vertex {0}")]
    NoAlternativeReachable(usize),

    #[error("factual instance {0} already satisfies the counterfactual threshold")]
    FactualIsCounterfactual(usize),

    #[error("no reachable counterfactual candidates")]
    NoReachableCandidates,

    #[error("instance is not part of the lookup table")]
    UnknownInstance,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
