use alloc::string::String;

/// Errors reported by the operators in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid weight parameter: {0}")]
    InvalidWeight(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("density is not integrable near the origin")]
    NonIntegrableWeight,
    #[error("recurrence coefficients did not stabilize (relative change {0:e})")]
    QuadratureNonConvergence(f64),
    #[error("requested degree {requested} exceeds the degree cap {cap}")]
    DegreeCapExceeded { requested: usize, cap: usize },
    #[error("tridiagonal eigensolver did not converge")]
    EigenFailure,
    #[error("degree {0} must be even")]
    OddDegree(usize),
    #[error("non-finite sample value")]
    NonFiniteSample,
    #[error("theta must exceed 1 (got {0})")]
    InvalidTheta(f64),
    #[error("budget infeasible for n = {n}: {reason}")]
    BudgetInfeasible { n: usize, reason: String },
    #[error("resolution {given} below the required {required}")]
    ResolutionTooLow { given: usize, required: usize },
    #[error("quadrature cutoff too small: tail {tail:e} vs value {value:e}")]
    CutoffTooSmall { tail: f64, value: f64 },
    #[error("kernel truncation insufficient: tail estimate {tail:e} exceeds {tol:e}")]
    TruncationInsufficient { tail: f64, tol: f64 },
    #[error("no empty cell found in the index set")]
    CellSearchFailure,
    #[error("rate fit needs at least 4 usable rows, got {usable}")]
    DegenerateFit { usable: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
