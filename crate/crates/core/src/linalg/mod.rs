//! Dense linear-algebra kernel shared by the solvers, the theory checks and
//! the benchmark harness.
//!
//! Column indices are 0-based throughout the library. Text files and JSON
//! reports produced by the command-line front end use 1-based indices.

mod index_set;
pub mod io;
mod lstsq;
mod matrix;
mod select;

pub use index_set::IndexSet;
pub use lstsq::{
    penalized_restricted_ls, residual_gradient, restricted_least_squares,
    solve_dense_least_squares, SupportProjector, CONDITION_LIMIT,
};
pub use matrix::Matrix;
pub use select::{hard_threshold, restrict_to_support, support_of, top_q_indices};

/// Dense real vector used for signals, measurements and residuals.
pub type Vector = nalgebra::DVector<f64>;

/// Largest absolute entry, `0.0` for an empty vector.
pub fn max_abs(v: &Vector) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}
