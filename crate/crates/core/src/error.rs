//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid step distribution: {0}")]
    InvalidDistribution(String),

    #[error("record length {record} does not match path length {path}")]
    LengthMismatch { record: usize, path: usize },

    #[error("index {index} out of bounds for length {len}")]
    IndexOutOfBounds { index: usize, len: usize },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("impossible record: the conditioning event has probability zero")]
    ImpossibleRecord,

    #[error("conditioning event has probability zero given the record")]
    ZeroProbabilityEvent,

    #[error("enumeration infeasible: explored {explored} nodes, cap {cap}")]
    EnumerationInfeasible { explored: u64, cap: u64 },

    #[error("state cap exceeded: {states} filter states, cap {cap}")]
    StateCapExceeded { states: u64, cap: u64 },

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("drift {drift} is not attainable by any exponential tilt of this step law")]
    UnattainableDrift { drift: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("truncation insufficient: tail bound {tail:e} exceeds 1e-12 of retained mass {retained:e}")]
    TruncationInsufficient { tail: f64, retained: f64 },

    #[error("all particles died; increase the particle count or check the record")]
    WeightCollapse,
}
