use thiserror::Error;

use crate::census::Census;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("the group generated by the triple is not transitive on 1..{0}")]
    NotTransitive(usize),

    #[error("braid orbit exceeded the cap of {0} keys")]
    OrbitTooLarge(usize),

    #[error("unsupported degree {degree}: {reason}")]
    UnsupportedDegree { degree: usize, reason: String },

    #[error("invalid family input: {0}")]
    InvalidFamilyInput(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    /// The census stopped early. When the caller asked for a census the
    /// partial run is attached and flagged incomplete.
    #[error("budget exceeded: {reason}")]
    BudgetExceeded {
        reason: String,
        partial: Option<Box<Census>>,
    },

    #[error("empty generating set")]
    NoGenerators,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
