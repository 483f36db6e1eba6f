use thiserror::Error;

use crate::graph::EdgePair;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(usize),

    #[error("vertex-count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("edge {0} is required but absent")]
    MissingEdge(EdgePair),

    #[error("edge {0} must be absent but is present")]
    UnexpectedEdge(EdgePair),

    #[error("malformed graph literal: {0}")]
    Parse(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("instance exceeds capacity: {0}")]
    Capacity(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("threshold at stage {stage} is {value}, the process cannot advance")]
    StalledThreshold { stage: usize, value: f64 },

    #[error("no admissible move at stage {stage}: {reason}")]
    DeadEnd { stage: usize, reason: String },

    #[error("transcripts were produced from different randomness tapes")]
    TapeMismatch,

    #[error("observation outside the model: {0}")]
    ModelViolation(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
