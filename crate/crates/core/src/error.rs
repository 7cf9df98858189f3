use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A requested enumeration or dense construction is larger than the configured guard.
    #[error("resource guard exceeded: {what} (requested {requested}, limit {limit})")]
    Resource {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    /// A parameter is outside the range where the computation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input value (bad pairing, bad permutation, mismatched sizes).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// An operator word climbs above the retained tensor level.
    #[error("truncation overflow: word reaches level {reached} but the truncation keeps levels 0..={level}")]
    Truncation { reached: usize, level: usize },

    /// Root bracketing failed within the search horizon.
    #[error("root search failed: {0}")]
    RootSearch(String),

    /// An invariant that the algorithm guarantees did not hold.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
