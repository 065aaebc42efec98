//! The generative model: random expander matrices, sparse Gaussian signals
//! and additive Gaussian noise on the sketch.

mod matrix;
mod problem;
mod signal;
mod verify;

pub use matrix::{generate_expander, ExpanderMatrix, RowAdjacency};
pub use problem::{generate_problem, GenParams, ProblemInstance};
pub use signal::SparseSignal;
pub use verify::{is_dissociated, verify_expansion};

/// `y = A x`, iterating only over the support of `x` in index order.
pub fn matvec(matrix: &ExpanderMatrix, x: &SparseSignal) -> crate::Result<alloc::vec::Vec<f64>> {
    matrix.matvec(x)
}
