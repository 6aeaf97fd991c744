use thiserror::Error;

/// Errors produced by table construction, parameter conversions and model fitting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {d}: must lie in 1..={max}")]
    InvalidDimension { d: usize, max: usize },

    #[error("length mismatch: expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("moment vector outside the moment body: cell {cell} has probability {value:e}")]
    InfeasibleMoment { cell: usize, value: f64 },

    #[error("multivariate logistic vector is not compatible with any distribution (best residual {residual:e} after {iterations} iterations)")]
    Incompatible { residual: f64, iterations: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("empty data: total count is zero")]
    EmptyData,

    #[error("graph is not chordal; use iterative proportional fitting")]
    NotChordal,

    #[error("iterative proportional fitting did not converge in {iterations} iterations (max marginal deviation {max_deviation:e})")]
    IterationLimit { iterations: usize, max_deviation: f64 },

    #[error("degenerate fit: cell {cell} has observed count {observed} but fitted count 0")]
    DegenerateFit { cell: usize, observed: f64 },

    #[error("rank deficient: {0}")]
    Rank(String),

    #[error("degenerate variance in column {column}")]
    DegenerateVariance { column: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for errors caused by malformed or inconsistent input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidDimension { .. }
                | Error::LengthMismatch { .. }
                | Error::InvalidArgument(_)
                | Error::EmptyData
                | Error::Parse { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
