use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension overflow: {0}")]
    DimensionOverflow(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("enumeration guard: {what} = {value} exceeds limit {limit}")]
    Guard {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("constraint matrices are linearly dependent (Gram eigenvalue {min_eigenvalue:e})")]
    RankDeficient { min_eigenvalue: f64 },

    #[error("SDP solver failed: {0}")]
    Solver(String),

    #[error("zero is not an interior point of the level-1 set: direction {sign}e_{index} violated by {violation:e}")]
    NotInterior {
        index: usize,
        sign: char,
        violation: f64,
    },

    #[error("not a density matrix: {0}")]
    NotAState(String),

    #[error("bisection failed: {0}")]
    Bisection(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::DimensionMismatch(_) => "dimension-mismatch",
            Self::NotSquare { .. } => "not-square",
            Self::NonFinite => "non-finite",
            Self::DimensionOverflow(_) => "dimension-overflow",
            Self::NoConvergence { .. } => "no-convergence",
            Self::Guard { .. } => "guard",
            Self::InvalidArgument(_) => "invalid-argument",
            Self::RankDeficient { .. } => "rank-deficient",
            Self::Solver(_) => "solver",
            Self::NotInterior { .. } => "not-interior",
            Self::NotAState(_) => "not-a-state",
            Self::Bisection(_) => "bisection",
        }
    }
}
