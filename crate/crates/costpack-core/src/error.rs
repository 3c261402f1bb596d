//! Solver-level errors.

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    /// An exact small-`k` solver was invoked on an instance whose cost
    /// function classifies differently.
    #[error("solver requires minimizer k = {expected}, but the instance classifies as k = {found}")]
    WrongClass { expected: usize, found: usize },
    /// The brute-force oracle refuses instances beyond its limit.
    #[error("instance has {n} items, oracle limit is {limit}")]
    TooLarge { n: usize, limit: usize },
    /// The node budget ran out; results so far are reported, never silently
    /// approximated.
    #[error("search node budget exhausted")]
    BudgetExceeded,
    /// An internal step that must succeed by construction failed; indicates
    /// a bug rather than a property of the input.
    #[error("internal solver invariant broken: {0}")]
    Internal(String),
}
