use thiserror::Error;

use crate::instances::InstanceError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("candidate list is empty")]
    EmptyCandidates,

    #[error("candidate {index} has non-finite score {score}")]
    NonFiniteScore { index: usize, score: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("instance too large for {what}: {detail}")]
    TooLarge { what: &'static str, detail: String },

    #[error("transcript budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },

    #[error(transparent)]
    Instance(#[from] InstanceError),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Rejects NaN, infinities and values `<= 0`.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(
            name,
            format!("must be a positive finite number, got {value}"),
        ))
    }
}
