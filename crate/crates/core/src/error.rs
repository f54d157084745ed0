use thiserror::Error;

use crate::matroid::ElementId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element {id} is not in the ground set (size {ground})")]
    InvalidElement { id: ElementId, ground: usize },

    /// A caller broke an operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The oracle answered in a way no matroid can. Every downstream guarantee is void.
    #[error("oracle violates the matroid axioms: {0}")]
    AxiomViolation(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("invalid matroid: {0}")]
    InvalidMatroid(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("cell ({row}, {col}): {reason}")]
    BadCell {
        row: usize,
        col: usize,
        reason: String,
    },

    #[error("rejected move ({invariant}) at ({row}, {col}): {reason}")]
    RejectedMove {
        invariant: &'static str,
        row: usize,
        col: usize,
        reason: String,
    },

    #[error("search guard of {guard} node expansions exceeded")]
    GuardExceeded { guard: u64 },

    #[error("schema: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}
