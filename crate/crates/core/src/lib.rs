//! Mixed discriminants of tuples of symmetric matrices: exact evaluation at
//! small `n`, doubly stochastic scaling of positive definite tuples, and
//! certified log-scale bounds for well-conditioned inputs.

mod ddouble;
pub mod error;
pub mod estimator;
pub mod exact;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod scaling;
pub mod tuples;

pub use error::{Error, Result};
pub use estimator::{
    bapat_lower, bregman_minc_upper, conditioned_upper, estimate, estimate_with_scaling,
    permanent_sandwich, DiscriminantEstimate,
};
pub use exact::{mixed_discriminant, permanent_naive, permanent_ryser, ExactValue};
pub use linalg::{cholesky, eigen_decompose, log_det, restrict_form, solve_spd, Matrix, SymMatrix};
pub use scaling::{
    apply_scaling, gradient_f, objective_f, scale_to_doubly_stochastic, ScalingResult, SolverConfig,
};
pub use tuples::{
    alpha_of, check_doubly_stochastic, from_matrix_rows, random_tuple, restrict_tuple,
    ConditionReport, MatrixTuple, StochasticityReport,
};
