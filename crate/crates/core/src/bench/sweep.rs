use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::ensemble::{generate_problem, ColumnScaling, EnsembleSpec, NoiseModel, Problem};
use crate::algorithms::{
    run, Algorithm, AlgorithmConfig, StoppingRule, BASELINE_ITERATION_CAP,
    NOISELESS_SUCCESS_THRESHOLD, NOISY_SUCCESS_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::linalg::top_q_indices;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    PhaseGamma,
    PhaseIters,
    PhaseK,
    Scaling,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::PhaseGamma => "phase-gamma",
            SweepKind::PhaseIters => "phase-iters",
            SweepKind::PhaseK => "phase-k",
            SweepKind::Scaling => "scaling",
        }
    }
}

/// Settings shared by every sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSettings {
    pub seed: u64,
    pub trials: usize,
    pub noise: NoiseModel,
    pub scaling: ColumnScaling,
    /// Worker threads; `None` uses the global rayon pool. Results do not
    /// depend on this.
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Timed runs per trial. Above 1 an untimed warm-up run comes first and
    /// the trial's runtime is the median of the timed runs.
    pub timing_repeats: usize,
    /// `None` picks 1e-5 without noise and 1e-3 with noise.
    pub success_threshold: Option<f64>,
    pub group_size: usize,
}

impl SweepSettings {
    pub fn new(seed: u64, trials: usize) -> Self {
        SweepSettings {
            seed,
            trials,
            noise: NoiseModel::None,
            scaling: ColumnScaling::Raw,
            threads: None,
            timing_repeats: 1,
            success_threshold: None,
            group_size: 2,
        }
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_timing_repeats(mut self, repeats: usize) -> Self {
        self.timing_repeats = repeats;
        self
    }

    pub fn threshold(&self) -> f64 {
        self.success_threshold.unwrap_or(match self.noise {
            NoiseModel::None => NOISELESS_SUCCESS_THRESHOLD,
            NoiseModel::Gaussian(_) => NOISY_SUCCESS_THRESHOLD,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("a sweep needs at least one trial"));
        }
        if self.timing_repeats == 0 {
            return Err(Error::invalid("timing repeats must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("thread count must be at least 1"));
        }
        let t = self.threshold();
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::invalid(format!(
                "success threshold {t} must be finite and >= 0"
            )));
        }
        Ok(())
    }
}

/// Result of one solver run on one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub success: bool,
    pub relative_error: f64,
    /// `L_k` of the estimate equals `L_k` of the true signal.
    pub support_match: bool,
    pub iterations: usize,
    /// Seconds.
    pub wall_time: f64,
}

/// Solver settings for one sweep cell.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Job {
    spec: EnsembleSpec,
    algorithm: Algorithm,
    gamma: f64,
    budget: usize,
}

impl Job {
    fn config(&self, settings: &SweepSettings) -> AlgorithmConfig {
        let threshold = settings.threshold();
        AlgorithmConfig::new(self.algorithm, self.spec.k)
            .with_gamma(self.gamma)
            .with_group_size(settings.group_size)
            .with_stopping(StoppingRule::RelativeError(threshold))
            .with_iteration_cap(self.budget)
            .with_success_threshold(threshold)
    }
}

/// Runs one trial, stopping as soon as the relative error meets the success
/// threshold or the budget is spent.
fn run_trial(problem: &Problem, config: &AlgorithmConfig, repeats: usize) -> Result<TrialOutcome> {
    let once = || -> Result<(crate::algorithms::AlgorithmReport, f64)> {
        let start = Instant::now();
        let report = run(&problem.a, &problem.y, Some(&problem.x), config)?;
        Ok((report, start.elapsed().as_secs_f64()))
    };
    let (report, wall_time) = if repeats == 1 {
        once()?
    } else {
        once()?;
        let mut runs = Vec::with_capacity(repeats);
        for _ in 0..repeats {
            runs.push(once()?);
        }
        runs.sort_by(|a, b| a.1.total_cmp(&b.1));
        runs.swap_remove(repeats / 2)
    };
    let k = config.sparsity;
    let support_match = top_q_indices(report.estimate(), k)? == top_q_indices(&problem.x, k)?;
    Ok(TrialOutcome {
        success: report.success.unwrap_or(false),
        relative_error: report.relative_error.unwrap_or(f64::NAN),
        support_match,
        iterations: report.iterations,
        wall_time,
    })
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::invalid(format!("cannot start {t} worker threads: {e}"))),
    }
}

/// Runs every (job, trial) pair in parallel. Outcomes come back grouped by
/// job in trial order whatever the scheduling.
fn execute(jobs: &[Job], settings: &SweepSettings) -> Result<Vec<Vec<TrialOutcome>>> {
    settings.validate()?;
    for job in jobs {
        job.spec.validate()?;
        job.config(settings).validate()?;
    }
    let trials = settings.trials;
    let flat: Vec<TrialOutcome> = in_pool(settings.threads, || {
        (0..jobs.len() * trials)
            .into_par_iter()
            .map(|idx| {
                let job = &jobs[idx / trials];
                let problem = generate_problem(&job.spec, idx % trials);
                run_trial(&problem, &job.config(settings), settings.timing_repeats)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(flat.chunks(trials).map(|c| c.to_vec()).collect())
}

/// Aggregated statistics of one sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellStats {
    pub sweep: SweepKind,
    pub algorithm: Algorithm,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    /// Only for algorithms with a selection threshold.
    pub gamma: Option<f64>,
    /// Iteration cap of the cell.
    pub budget: usize,
    pub noise: f64,
    pub trials: usize,
    pub successes: usize,
    pub support_matches: usize,
    pub mean_iterations: f64,
    /// Mean over successful trials only; `None` when none succeeded.
    pub mean_iterations_success: Option<f64>,
    pub mean_runtime: f64,
    pub median_runtime: f64,
}

impl CellStats {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    pub fn support_match_rate(&self) -> f64 {
        self.support_matches as f64 / self.trials as f64
    }

    pub fn failures(&self) -> usize {
        self.trials - self.successes
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let h = v.len() / 2;
    if v.len() % 2 == 1 {
        v[h]
    } else {
        0.5 * (v[h - 1] + v[h])
    }
}

fn aggregate(kind: SweepKind, job: &Job, budget: usize, outcomes: &[TrialOutcome]) -> CellStats {
    let trials = outcomes.len();
    let succeeded: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.success).collect();
    let mean = |it: &mut dyn Iterator<Item = f64>, len: usize| it.sum::<f64>() / len as f64;
    CellStats {
        sweep: kind,
        algorithm: job.algorithm,
        m: job.spec.m,
        n: job.spec.n,
        k: job.spec.k,
        gamma: job.algorithm.uses_gamma().then_some(job.gamma),
        budget,
        noise: job.spec.noise.amplitude(),
        trials,
        successes: succeeded.len(),
        support_matches: outcomes.iter().filter(|o| o.support_match).count(),
        mean_iterations: mean(&mut outcomes.iter().map(|o| o.iterations as f64), trials),
        mean_iterations_success: (!succeeded.is_empty()).then(|| {
            mean(
                &mut succeeded.iter().map(|o| o.iterations as f64),
                succeeded.len(),
            )
        }),
        mean_runtime: mean(&mut outcomes.iter().map(|o| o.wall_time), trials),
        median_runtime: median(outcomes.iter().map(|o| o.wall_time).collect()),
    }
}

/// Run provenance written to the JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub sweep: SweepKind,
    pub settings: SweepSettings,
    pub success_threshold: f64,
    pub grid: Value,
    pub version: &'static str,
    pub build: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub provenance: Provenance,
    pub cells: Vec<CellStats>,
}

impl SweepResult {
    fn new(kind: SweepKind, settings: &SweepSettings, grid: Value, cells: Vec<CellStats>) -> Self {
        SweepResult {
            provenance: Provenance {
                sweep: kind,
                settings: settings.clone(),
                success_threshold: settings.threshold(),
                grid,
                version: env!("CARGO_PKG_VERSION"),
                build: env!("DOMP_BUILD_ID"),
            },
            cells,
        }
    }

    /// Cell lookup used by tests and reports.
    pub fn cell(
        &self,
        algorithm: Algorithm,
        k: usize,
        gamma: Option<f64>,
        budget: Option<usize>,
    ) -> Option<&CellStats> {
        self.cells.iter().find(|c| {
            c.algorithm == algorithm
                && c.k == k
                && (gamma.is_none() || c.gamma == gamma)
                && budget.is_none_or(|b| c.budget == b)
        })
    }
}

fn check_algorithms(algorithms: &[Algorithm]) -> Result<()> {
    if algorithms.is_empty() {
        return Err(Error::invalid("no algorithms selected"));
    }
    Ok(())
}

/// Success rate per `(k, gamma, algorithm)` with a `k`-iteration budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaSweep {
    pub m: usize,
    pub n: usize,
    pub ks: Vec<usize>,
    pub gammas: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
}

pub fn gamma_sweep(grid: &GammaSweep, settings: &SweepSettings) -> Result<SweepResult> {
    check_algorithms(&grid.algorithms)?;
    let mut jobs = Vec::new();
    for &k in &grid.ks {
        let spec = ensemble(grid.m, grid.n, k, settings);
        for &algorithm in &grid.algorithms {
            // algorithms without a threshold get a single cell per k
            let gammas: &[f64] = if algorithm.uses_gamma() {
                &grid.gammas
            } else {
                &[0.9]
            };
            for &gamma in gammas {
                jobs.push(Job {
                    spec,
                    algorithm,
                    gamma,
                    budget: algorithm.default_budget(k),
                });
            }
        }
    }
    let outcomes = execute(&jobs, settings)?;
    let kind = SweepKind::PhaseGamma;
    let cells = jobs
        .iter()
        .zip(&outcomes)
        .map(|(j, o)| aggregate(kind, j, j.budget, o))
        .collect();
    Ok(SweepResult::new(
        kind,
        settings,
        serde_json::to_value(grid).unwrap_or_default(),
        cells,
    ))
}

/// Success rate per `(k, budget, algorithm)`. Each trial runs once up to the
/// largest budget; a trial counts as a success at budget `p` when it met the
/// success criterion within `p` iterations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationSweep {
    pub m: usize,
    pub n: usize,
    pub ks: Vec<usize>,
    pub budgets: Vec<usize>,
    pub gamma: f64,
    pub algorithms: Vec<Algorithm>,
}

pub fn iteration_sweep(grid: &IterationSweep, settings: &SweepSettings) -> Result<SweepResult> {
    check_algorithms(&grid.algorithms)?;
    let max_budget = grid
        .budgets
        .iter()
        .copied()
        .max()
        .ok_or_else(|| Error::invalid("no iteration budgets given"))?;
    let mut jobs = Vec::new();
    for &k in &grid.ks {
        let spec = ensemble(grid.m, grid.n, k, settings);
        for &algorithm in &grid.algorithms {
            jobs.push(Job {
                spec,
                algorithm,
                gamma: grid.gamma,
                budget: max_budget,
            });
        }
    }
    let outcomes = execute(&jobs, settings)?;
    let kind = SweepKind::PhaseIters;
    let mut cells = Vec::new();
    for (job, full) in jobs.iter().zip(&outcomes) {
        for &p in &grid.budgets {
            let truncated: Vec<TrialOutcome> = full
                .iter()
                .map(|o| {
                    let mut t = *o;
                    if o.iterations > p || !o.success {
                        t.success = false;
                        t.iterations = o.iterations.min(p);
                    }
                    t
                })
                .collect();
            let mut cell = aggregate(kind, job, p, &truncated);
            // the estimate at budget p is only known for runs that ended by then
            cell.support_matches = full
                .iter()
                .filter(|o| o.support_match && o.iterations <= p)
                .count();
            cells.push(cell);
        }
    }
    Ok(SweepResult::new(
        kind,
        settings,
        serde_json::to_value(grid).unwrap_or_default(),
        cells,
    ))
}

/// Success rate against sparsity with each algorithm's default budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparsitySweep {
    pub m: usize,
    pub n: usize,
    pub ks: Vec<usize>,
    pub gamma: f64,
    pub algorithms: Vec<Algorithm>,
}

pub fn success_curves(grid: &SparsitySweep, settings: &SweepSettings) -> Result<SweepResult> {
    check_algorithms(&grid.algorithms)?;
    let mut jobs = Vec::new();
    for &k in &grid.ks {
        let spec = ensemble(grid.m, grid.n, k, settings);
        for &algorithm in &grid.algorithms {
            jobs.push(Job {
                spec,
                algorithm,
                gamma: grid.gamma,
                budget: algorithm.default_budget(k),
            });
        }
    }
    let outcomes = execute(&jobs, settings)?;
    let kind = SweepKind::PhaseK;
    let cells = jobs
        .iter()
        .zip(&outcomes)
        .map(|(j, o)| aggregate(kind, j, j.budget, o))
        .collect();
    Ok(SweepResult::new(
        kind,
        settings,
        serde_json::to_value(grid).unwrap_or_default(),
        cells,
    ))
}

/// Iterations and runtime to success as the problem grows with
/// `n = n_ratio * m` and `k = floor(k_fraction * m)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingSweep {
    pub ms: Vec<usize>,
    pub n_ratio: usize,
    pub k_fraction: f64,
    pub gamma: f64,
    pub algorithms: Vec<Algorithm>,
}

impl ScalingSweep {
    pub fn sparsity(&self, m: usize) -> usize {
        (self.k_fraction * m as f64).floor() as usize
    }

    /// Greedy solvers may use up to `m` iterations; CoSaMP and SP keep
    /// their usual cap.
    pub fn budget(algorithm: Algorithm, m: usize) -> usize {
        match algorithm {
            Algorithm::Cosamp | Algorithm::Sp => BASELINE_ITERATION_CAP,
            _ => m,
        }
    }
}

pub fn scaling_benchmark(grid: &ScalingSweep, settings: &SweepSettings) -> Result<SweepResult> {
    check_algorithms(&grid.algorithms)?;
    if !(grid.k_fraction > 0.0 && grid.k_fraction <= 1.0) || grid.n_ratio == 0 {
        return Err(Error::invalid(
            "scaling needs 0 < k_fraction <= 1 and n_ratio >= 1",
        ));
    }
    let mut jobs = Vec::new();
    for &m in &grid.ms {
        let spec = ensemble(m, grid.n_ratio * m, grid.sparsity(m), settings);
        for &algorithm in &grid.algorithms {
            jobs.push(Job {
                spec,
                algorithm,
                gamma: grid.gamma,
                budget: ScalingSweep::budget(algorithm, m),
            });
        }
    }
    let outcomes = execute(&jobs, settings)?;
    let kind = SweepKind::Scaling;
    let cells = jobs
        .iter()
        .zip(&outcomes)
        .map(|(j, o)| aggregate(kind, j, j.budget, o))
        .collect();
    Ok(SweepResult::new(
        kind,
        settings,
        serde_json::to_value(grid).unwrap_or_default(),
        cells,
    ))
}

fn ensemble(m: usize, n: usize, k: usize, settings: &SweepSettings) -> EnsembleSpec {
    EnsembleSpec::new(m, n, k, settings.seed)
        .with_scaling(settings.scaling)
        .with_noise(settings.noise)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepSettings {
        SweepSettings::new(5, 6)
    }

    #[test]
    fn easy_regime_succeeds_for_every_gamma() {
        let grid = GammaSweep {
            m: 40,
            n: 100,
            ks: vec![2],
            gammas: vec![0.1, 0.5, 1.0],
            algorithms: vec![Algorithm::Domp, Algorithm::Edomp, Algorithm::Omp],
        };
        let r = gamma_sweep(&grid, &small()).unwrap();
        assert_eq!(r.cells.len(), 7);
        assert!(r
            .cells
            .iter()
            .all(|c| c.successes == c.trials && c.trials == 6));
        assert_eq!(r.cell(Algorithm::Omp, 2, None, None).unwrap().gamma, None);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let grid = SparsitySweep {
            m: 30,
            n: 80,
            ks: vec![4, 10],
            gamma: 0.9,
            algorithms: vec![Algorithm::Domp, Algorithm::Sp],
        };
        let mut a = success_curves(&grid, &small().with_threads(Some(1))).unwrap();
        let mut b = success_curves(&grid, &small().with_threads(Some(3))).unwrap();
        for c in a.cells.iter_mut().chain(b.cells.iter_mut()) {
            c.mean_runtime = 0.0;
            c.median_runtime = 0.0;
        }
        assert_eq!(a.cells, b.cells);
    }

    #[test]
    fn more_trials_keep_earlier_outcomes() {
        let job = Job {
            spec: EnsembleSpec::new(20, 60, 6, 3),
            algorithm: Algorithm::Domp,
            gamma: 0.7,
            budget: 6,
        };
        let few = execute(&[job], &SweepSettings::new(3, 4)).unwrap();
        let many = execute(&[job], &SweepSettings::new(3, 9)).unwrap();
        let strip = |v: &[TrialOutcome]| {
            v.iter()
                .map(|o| (o.success, o.iterations, o.support_match))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&few[0]), strip(&many[0][..4]));
    }

    #[test]
    fn iteration_budgets_are_cumulative() {
        let grid = IterationSweep {
            m: 40,
            n: 120,
            ks: vec![8],
            budgets: vec![1, 2, 4, 8, 16],
            gamma: 0.9,
            algorithms: vec![Algorithm::Domp],
        };
        let r = iteration_sweep(&grid, &small()).unwrap();
        let rates: Vec<usize> = r.cells.iter().map(|c| c.successes).collect();
        assert!(rates.windows(2).all(|w| w[0] <= w[1]), "{rates:?}");
        assert_eq!(rates[0], 0);
        assert!(r.cells.iter().all(|c| c.mean_iterations <= c.budget as f64));
    }

    #[test]
    fn scaling_uses_fractional_sparsity() {
        let grid = ScalingSweep {
            ms: vec![20, 30],
            n_ratio: 5,
            k_fraction: 0.3,
            gamma: 0.9,
            algorithms: vec![Algorithm::Omp],
        };
        let r = scaling_benchmark(&grid, &small().with_timing_repeats(3)).unwrap();
        assert_eq!(r.cells[0].k, 6);
        assert_eq!((r.cells[1].m, r.cells[1].n, r.cells[1].k), (30, 150, 9));
        for c in &r.cells {
            if c.successes > 0 {
                assert!(c.mean_iterations_success.unwrap() >= c.k as f64 - 1.0);
            }
        }
    }

    #[test]
    fn invalid_settings() {
        let grid = SparsitySweep {
            m: 10,
            n: 20,
            ks: vec![2],
            gamma: 0.9,
            algorithms: vec![Algorithm::Omp],
        };
        assert!(success_curves(&grid, &SweepSettings::new(0, 0)).is_err());
        assert!(success_curves(&grid, &small().with_threads(Some(0))).is_err());
        let empty = SparsitySweep {
            algorithms: vec![],
            ..grid.clone()
        };
        assert!(success_curves(&empty, &small()).is_err());
        let bad_gamma = SparsitySweep {
            gamma: 1.5,
            algorithms: vec![Algorithm::Domp],
            ..grid
        };
        assert!(success_curves(&bad_gamma, &small()).is_err());
    }

    #[test]
    fn noisy_runs_use_the_looser_threshold() {
        let s = small().with_noise(NoiseModel::Gaussian(0.001));
        assert_eq!(s.threshold(), 1e-3);
        assert_eq!(small().threshold(), 1e-5);
    }
}
