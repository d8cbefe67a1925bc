use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{residual_gradient, IndexSet, Matrix, Vector};

/// One iterate of a greedy solver.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    /// Current estimate `x^(p)`.
    pub x: Vector,
    /// Accumulated support estimate `S^(p)`.
    pub support: IndexSet,
    /// Gradient residual `A^T (y - A x^(p))`.
    pub gradient: Vector,
    /// Iteration counter `p`.
    pub iteration: usize,
    /// `||y - A x^(p)||_2`.
    pub residual_norm: f64,
    /// Support of the least-squares solve that produced `x`. Equals `support`
    /// except after an EDOMP thresholding step, where it is the thresholded set.
    pub projection_support: IndexSet,
    /// Indices chosen by the step that produced this state; empty at `p = 0`.
    pub selected: IndexSet,
    /// Whether that step had to threshold back to `k` entries.
    pub thresholded: bool,
}

impl IterateState {
    /// The zero iterate: `x = 0`, empty support, `r = A^T y`.
    pub fn initial(a: &Matrix, y: &Vector) -> Result<Self> {
        let x = Vector::zeros(a.cols());
        let gradient = residual_gradient(a, y, &x)?;
        Ok(IterateState {
            x,
            support: IndexSet::empty(),
            gradient,
            iteration: 0,
            residual_norm: y.norm(),
            projection_support: IndexSet::empty(),
            selected: IndexSet::empty(),
            thresholded: false,
        })
    }

    /// Builds the state for a new estimate, recomputing both residuals.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_estimate(
        a: &Matrix,
        y: &Vector,
        x: Vector,
        support: IndexSet,
        projection_support: IndexSet,
        iteration: usize,
        selected: IndexSet,
        thresholded: bool,
    ) -> Self {
        let residual = y - a.apply(&x);
        let gradient = a.apply_transpose(&residual);
        IterateState {
            x,
            support,
            gradient,
            iteration,
            residual_norm: residual.norm(),
            projection_support,
            selected,
            thresholded,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// The `MaxIterations` budget was used up.
    MaxIterations,
    /// A residual or error criterion was met.
    CriterionMet,
    /// A criterion-based rule hit the iteration cap first.
    IterationCap,
    /// The gradient vanished, so the iterate already solves the problem.
    GlobalOptimum,
    /// SP only: the residual grew, and the previous iterate was kept.
    ResidualIncrease,
    /// CoSaMP or SP revisited the same support and would cycle.
    Stagnation,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::MaxIterations => "max-iterations",
            Termination::CriterionMet => "criterion-met",
            Termination::IterationCap => "iteration-cap",
            Termination::GlobalOptimum => "global-optimum",
            Termination::ResidualIncrease => "residual-increase",
            Termination::Stagnation => "stagnation",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-iteration record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    /// Iteration number after the step, starting at 1.
    pub iteration: usize,
    pub support_size: usize,
    /// Number of indices chosen in this step.
    pub selected_count: usize,
    #[serde(skip)]
    pub selected: IndexSet,
    pub residual_norm: f64,
    pub gradient_norm: f64,
    pub thresholded: bool,
}

impl TraceEntry {
    pub(crate) fn of(state: &IterateState) -> Self {
        TraceEntry {
            iteration: state.iteration,
            support_size: state.support.len(),
            selected_count: state.selected.len(),
            selected: state.selected.clone(),
            residual_norm: state.residual_norm,
            gradient_norm: state.gradient.norm(),
            thresholded: state.thresholded,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AlgorithmReport {
    pub final_state: IterateState,
    pub iterations: usize,
    pub termination: Termination,
    pub trace: Vec<TraceEntry>,
    pub wall_time: std::time::Duration,
    /// Relative error against the true signal, when it was supplied.
    pub relative_error: Option<f64>,
    /// `relative_error <= success_threshold`, when the true signal was supplied.
    pub success: Option<bool>,
    /// Non-fatal conditions noticed while running, such as `k >= m`.
    pub warnings: Vec<String>,
}

impl AlgorithmReport {
    pub fn estimate(&self) -> &Vector {
        &self.final_state.x
    }
}

/// `||x - truth||_2 / ||truth||_2`, or the absolute error when `truth = 0`.
pub fn relative_error(x: &Vector, truth: &Vector) -> f64 {
    let diff = (x - truth).norm();
    let scale = truth.norm();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}
