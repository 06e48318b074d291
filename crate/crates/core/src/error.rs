use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} nodes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("vector {0:?} is not a unit vector (|a| - 1 = {1:e})")]
    NotUnit([f64; 3], f64),

    #[error("field is not saturated: node {node} has |m| - 1 = {deviation:e}")]
    NotSaturated { node: usize, deviation: f64 },

    #[error("non-finite value at node {0}")]
    NonFinite(usize),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("non-positive value {value:e} at sample {index}")]
    NonPositive { index: usize, value: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
