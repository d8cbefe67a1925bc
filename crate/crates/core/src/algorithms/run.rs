use std::time::Instant;

use super::config::{Algorithm, AlgorithmConfig, StoppingRule};
use super::greedy::{greedy_step, Context, Selection, Solver, Thresholding};
use super::state::{relative_error, AlgorithmReport, IterateState, Termination, TraceEntry};
use crate::error::{Error, Result};
use crate::linalg::{
    restrict_to_support, restricted_least_squares, top_q_indices, IndexSet, Matrix, Vector,
};

enum Advance {
    Next(IterateState),
    Stop(Termination),
}

trait Stepper {
    fn advance(&mut self, state: &IterateState) -> Result<Advance>;
}

struct Greedy<'a> {
    ctx: Context<'a>,
    solver: Solver<'a>,
    selection: Selection,
    thresholding: Option<Thresholding>,
}

impl Stepper for Greedy<'_> {
    fn advance(&mut self, state: &IterateState) -> Result<Advance> {
        greedy_step(
            &self.ctx,
            &mut self.solver,
            state,
            self.selection,
            self.thresholding,
        )
        .map(Advance::Next)
    }
}

/// CoSaMP: merge the `2k` largest gradient entries into the current support,
/// solve least squares on the union and prune to the `k` largest entries.
struct Cosamp<'a> {
    ctx: &'a Context<'a>,
    k: usize,
    previous_merge: Option<IndexSet>,
}

impl Stepper for Cosamp<'_> {
    fn advance(&mut self, state: &IterateState) -> Result<Advance> {
        let (a, y) = (self.ctx.a, self.ctx.y);
        let width = (2 * self.k).min(a.cols());
        let proxy = top_q_indices(&state.gradient, width)?;
        let merged = state.support.union(&proxy);
        if self.previous_merge.as_ref() == Some(&merged) {
            return Ok(Advance::Stop(Termination::Stagnation));
        }
        let b = restricted_least_squares(a, y, &merged)?;
        let keep = top_q_indices(&b, self.k)?;
        let x = restrict_to_support(&b, &keep)?;
        let thresholded = merged.len() > self.k;
        self.previous_merge = Some(merged.clone());
        Ok(Advance::Next(IterateState::from_estimate(
            a,
            y,
            x,
            keep,
            merged,
            state.iteration + 1,
            proxy,
            thresholded,
        )))
    }
}

/// Subspace pursuit: add the `k` largest gradient entries, solve least
/// squares on the union, keep its `k` largest entries and re-project.
struct SubspacePursuit<'a> {
    ctx: &'a Context<'a>,
    k: usize,
}

impl Stepper for SubspacePursuit<'_> {
    fn advance(&mut self, state: &IterateState) -> Result<Advance> {
        let (a, y) = (self.ctx.a, self.ctx.y);
        let proxy = top_q_indices(&state.gradient, self.k)?;
        let merged = state.support.union(&proxy);
        let b = restricted_least_squares(a, y, &merged)?;
        let keep = top_q_indices(&b, self.k)?;
        if state.iteration > 0 && keep == state.support {
            return Ok(Advance::Stop(Termination::Stagnation));
        }
        let x = restricted_least_squares(a, y, &keep)?;
        let next = IterateState::from_estimate(
            a,
            y,
            x,
            keep.clone(),
            keep,
            state.iteration + 1,
            proxy,
            merged.len() > self.k,
        );
        if next.residual_norm > state.residual_norm {
            return Ok(Advance::Stop(Termination::ResidualIncrease));
        }
        Ok(Advance::Next(next))
    }
}

fn criterion_met(rule: StoppingRule, state: &IterateState, truth: Option<&Vector>) -> bool {
    match rule {
        StoppingRule::MaxIterations(p) => state.iteration >= p,
        StoppingRule::MeasurementResidual(e) => state.residual_norm <= e,
        StoppingRule::GradientResidual(e) => state.gradient.norm() <= e,
        StoppingRule::RelativeError(e) => truth.is_some_and(|t| relative_error(&state.x, t) <= e),
    }
}

fn check_inputs(
    a: &Matrix,
    y: &Vector,
    truth: Option<&Vector>,
    config: &AlgorithmConfig,
) -> Result<Vec<String>> {
    config.validate()?;
    if y.len() != a.rows() {
        return Err(Error::invalid(format!(
            "measurement length {} does not match the {} rows of the matrix",
            y.len(),
            a.rows()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("measurements contain a non-finite value"));
    }
    if let Some(t) = truth {
        if t.len() != a.cols() {
            return Err(Error::invalid(format!(
                "true signal length {} does not match the {} columns of the matrix",
                t.len(),
                a.cols()
            )));
        }
    }
    if config.sparsity > a.cols() {
        return Err(Error::invalid(format!(
            "sparsity k={} exceeds the number of columns n={}",
            config.sparsity,
            a.cols()
        )));
    }
    if matches!(config.stopping, Some(StoppingRule::RelativeError(_))) && truth.is_none() {
        return Err(Error::invalid(
            "the relative-error stopping rule needs the true signal",
        ));
    }
    let mut warnings = Vec::new();
    if config.sparsity >= a.rows() {
        warnings.push(format!(
            "sparsity k={} is not below the number of measurements m={}; \
             least-squares subproblems may be underdetermined",
            config.sparsity,
            a.rows()
        ));
    }
    Ok(warnings)
}

/// Runs the configured solver from the zero iterate.
///
/// Each pass first checks the stopping rule, then the iteration cap, then
/// whether the gradient has vanished, and only then takes a step. `truth`
/// enables the relative-error rule and fills in the success fields.
pub fn run(
    a: &Matrix,
    y: &Vector,
    truth: Option<&Vector>,
    config: &AlgorithmConfig,
) -> Result<AlgorithmReport> {
    let start = Instant::now();
    let warnings = check_inputs(a, y, truth, config)?;
    let ctx = Context::new(a, y, config.zero_tolerance)?;
    let k = config.sparsity;
    let dynamic = Selection::Dynamic {
        k,
        gamma: config.gamma,
    };
    let mut stepper: Box<dyn Stepper + '_> = match config.algorithm {
        Algorithm::Omp | Algorithm::Gomp | Algorithm::Domp | Algorithm::Edomp => {
            let selection = match config.algorithm {
                Algorithm::Omp => Selection::Single,
                Algorithm::Gomp => Selection::Group(config.group_size),
                _ => dynamic,
            };
            let thresholding = (config.algorithm == Algorithm::Edomp).then_some(Thresholding {
                k,
                reset_support: config.reset_support,
            });
            Box::new(Greedy {
                solver: Solver::incremental(&ctx),
                ctx: ctx.clone(),
                selection,
                thresholding,
            })
        }
        Algorithm::Cosamp => Box::new(Cosamp {
            ctx: &ctx,
            k,
            previous_merge: None,
        }),
        Algorithm::Sp => Box::new(SubspacePursuit { ctx: &ctx, k }),
    };

    let rule = config.effective_stopping();
    let cap = config.effective_cap();
    let mut state = IterateState::initial(a, y)?;
    let mut trace = Vec::new();
    let termination = loop {
        if criterion_met(rule, &state, truth) {
            break match rule {
                StoppingRule::MaxIterations(_) => Termination::MaxIterations,
                _ => Termination::CriterionMet,
            };
        }
        if state.iteration >= cap {
            break Termination::IterationCap;
        }
        if ctx.gradient_vanishes(&state.gradient) {
            break Termination::GlobalOptimum;
        }
        match stepper.advance(&state) {
            Ok(Advance::Next(next)) => {
                trace.push(TraceEntry::of(&next));
                state = next;
            }
            Ok(Advance::Stop(reason)) => break reason,
            Err(Error::ZeroResidual) => break Termination::GlobalOptimum,
            Err(e) => return Err(e),
        }
    };
    let relative = truth.map(|t| relative_error(&state.x, t));
    Ok(AlgorithmReport {
        iterations: state.iteration,
        termination,
        trace,
        wall_time: start.elapsed(),
        relative_error: relative,
        success: relative.map(|e| e <= config.success_threshold),
        warnings,
        final_state: state,
    })
}

fn run_as(
    algorithm: Algorithm,
    a: &Matrix,
    y: &Vector,
    truth: Option<&Vector>,
    config: &AlgorithmConfig,
) -> Result<AlgorithmReport> {
    let mut config = config.clone();
    config.algorithm = algorithm;
    run(a, y, truth, &config)
}

/// [`run`] with the algorithm forced to gOMP.
pub fn gomp_run(
    a: &Matrix,
    y: &Vector,
    truth: Option<&Vector>,
    config: &AlgorithmConfig,
) -> Result<AlgorithmReport> {
    run_as(Algorithm::Gomp, a, y, truth, config)
}

/// [`run`] with the algorithm forced to CoSaMP.
pub fn cosamp_run(
    a: &Matrix,
    y: &Vector,
    truth: Option<&Vector>,
    config: &AlgorithmConfig,
) -> Result<AlgorithmReport> {
    run_as(Algorithm::Cosamp, a, y, truth, config)
}

/// [`run`] with the algorithm forced to subspace pursuit.
pub fn sp_run(
    a: &Matrix,
    y: &Vector,
    truth: Option<&Vector>,
    config: &AlgorithmConfig,
) -> Result<AlgorithmReport> {
    run_as(Algorithm::Sp, a, y, truth, config)
}
