use thiserror::Error;

use crate::scaling::ScalingResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Iterative eigensolver hit its sweep cap.
    #[error("eigensolver did not converge: off-diagonal residual {residual:e} after {sweeps} sweeps")]
    NumericalFailure { residual: f64, sweeps: usize },

    /// Cholesky pivot at `pivot` was not safely positive.
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    /// A tuple member failed the positive definiteness requirement.
    #[error("tuple member {matrix} is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    TupleNotPositiveDefinite { matrix: usize, min_eigenvalue: f64 },

    #[error("basis columns are not orthonormal (max deviation {deviation:e})")]
    BasisNotOrthonormal { deviation: f64 },

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnitVector { norm: f64 },

    #[error("dimension {n} exceeds the cap of {cap}")]
    DimensionTooLarge { n: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Solver exhausted its iteration budget; carries the best iterate found.
    #[error("scaling did not converge: residual {:e} after {} iterations", .best.residual, .best.iterations)]
    NoConvergence { best: Box<ScalingResult> },

    #[error("hypothesis violated at row {row}: {reason}")]
    HypothesisViolated { row: usize, reason: String },

    /// A checked inequality or identity failed numerically.
    #[error("property violated: {0}")]
    PropertyViolated(String),

    #[error("unknown experiment suite {0:?}")]
    UnknownSuite(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
