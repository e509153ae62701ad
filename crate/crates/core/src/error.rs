use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameters outside the documented domain of an operation.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Structurally malformed input (rotation systems, trail families).
    #[error("validation failed: {0}")]
    Validation(String),

    /// A resource guard refused to run (subset-indexed work, DFS step caps).
    #[error("resource guard: {what} (limit {limit})")]
    ResourceGuard { what: String, limit: u64 },

    /// The exhaustive oracle refused because the search space is too large.
    #[error("search budget exceeded: need {needed} rotation systems, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    /// A consistency check that should never fire did.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::ResourceGuard { .. } | Error::BudgetExceeded { .. } | Error::InvalidParams(_)
        )
    }
}
