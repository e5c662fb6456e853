use thiserror::Error;

use crate::label::{Color, Label};
use crate::subdivision::StageId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("color {color} occurs twice: {first} and {second}")]
    ColorClash {
        color: Color,
        first: String,
        second: String,
    },

    #[error("vertex {0} not found")]
    VertexNotFound(Label),

    #[error("complex is not pure")]
    NotPure,

    #[error("malformed label: {0}")]
    MalformedLabel(String),

    #[error("color {color} out of range for n = {n}")]
    ColorOutOfRange { color: Color, n: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("unknown tower position: {0}")]
    UnknownPosition(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("exploration exceeded depth {0}")]
    DepthExceeded(usize),

    #[error("decision map has no value for {0}")]
    DecisionMapUndefined(Label),

    #[error("specialization table has no entry for process {pid} at stage {stage} with {vertex}")]
    TableMiss { pid: Color, stage: StageId, vertex: Label },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("protocol invariant broken: {0}")]
    Protocol(String),

    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("decision map is undefined at {0}")]
    Undefined(Label),

    #[error("generic and optimized runs disagree for process {pid}: {generic} vs {optimized}")]
    OutputMismatch {
        pid: Color,
        generic: String,
        optimized: String,
    },

    #[error("invalid task or table: {0}")]
    Invalid(String),

    #[error(transparent)]
    Complex(#[from] ComplexError),

    #[error(transparent)]
    Sim(#[from] SimError),
}
