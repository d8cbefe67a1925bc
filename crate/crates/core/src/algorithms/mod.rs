//! Greedy sparse-recovery solvers.
//!
//! OMP, gOMP, DOMP and EDOMP are exposed both as single-step functions over
//! an [`IterateState`] and through [`run`]; CoSaMP and subspace pursuit are
//! available through [`run`] only.

mod config;
mod greedy;
mod run;
mod state;

pub use config::{
    Algorithm, AlgorithmConfig, StoppingRule, BASELINE_ITERATION_CAP, NOISELESS_SUCCESS_THRESHOLD,
    NOISY_SUCCESS_THRESHOLD,
};
pub use greedy::{domp_step, edomp_step, gomp_step, omp_step, select_dynamic_indices};
pub use run::{cosamp_run, gomp_run, run, sp_run};
pub use state::{relative_error, AlgorithmReport, IterateState, Termination, TraceEntry};
