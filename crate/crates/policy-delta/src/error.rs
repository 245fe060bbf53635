//! Error type shared across the crate.

use crate::data::Framing;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error("record {index}: logging propensity {value} outside (0, 1]")]
    NonFinitePropensity { index: usize, value: f64 },

    #[error("record {index}: reward {value} is not finite")]
    NonFiniteReward { index: usize, value: f64 },

    #[error("record {index}: arm label {arm:?} not among the dataset arms")]
    UnknownArmLabel { index: usize, arm: Option<String> },

    #[error("record {index}: action {action} out of range for action count {action_count}")]
    ActionOutOfRange {
        index: usize,
        action: usize,
        action_count: usize,
    },

    #[error("operation requires {expected:?}-framed data, got {found:?}")]
    WrongFraming { expected: Framing, found: Framing },

    #[error("arm {arm:?} has no records")]
    EmptyArm { arm: String },

    #[error("expected reward is not finite")]
    NonFiniteExpectedReward,

    #[error("input is empty")]
    EmptyInput,

    #[error("insufficient data: need more than {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("an action-agnostic reward model is required here")]
    ActionAwareModelRejected,

    #[error("predictor has zero variance")]
    ZeroVariancePredictor,

    #[error("outcome has zero variance")]
    ZeroVarianceOutcome,

    #[error("logging propensity must be strictly positive")]
    ZeroPropensity,

    #[error("all importance weights are zero")]
    DegenerateWeights,

    #[error("policy or model does not cover the dataset's action set: {0}")]
    UnknownActionSet(String),

    #[error("allocation probability {0} outside (0, 1)")]
    InvalidAllocation(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("reward model does not fit the data: {0}")]
    ModelShape(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
