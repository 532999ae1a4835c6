use thiserror::Error;

/// Errors shared across the library.
///
/// Budget violations are always explicit: no solver silently degrades to an
/// approximation when an exact answer was requested.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate points at indices {0} and {1}")]
    DuplicatePoints(usize, usize),

    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(String),

    #[error("gamma has no positive dyadic value with denominator 2^20 for epsilon {0}")]
    GammaUnderflow(String),

    #[error("generator parameters infeasible: {0}")]
    InfeasibleGenerator(String),

    #[error("graph has no edge lengths but the algorithm requires them")]
    MissingLengths,

    #[error("vertex {0} out of range for graph of {1} vertices")]
    VertexOutOfRange(usize, usize),

    #[error("cell holds {population} points, exceeding the exact-solve budget of {budget}; rerun with a larger cell budget or a larger epsilon")]
    CellTooLarge { population: usize, budget: usize },

    #[error("budget exceeded in {what} (limit {limit})")]
    BudgetExceeded { what: &'static str, limit: u64 },

    #[error("no potential-decreasing clique re-bipartition exists for an overlapping pair")]
    SeparationStuck,

    #[error("runtime invariant violated: {0}")]
    InvariantViolation(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

pub type Result<T> = std::result::Result<T, Error>;
