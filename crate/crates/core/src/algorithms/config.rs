use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Iteration cap used by CoSaMP and SP when no explicit cap is given.
pub const BASELINE_ITERATION_CAP: usize = 500;

/// Default success threshold on the relative error for noiseless problems.
pub const NOISELESS_SUCCESS_THRESHOLD: f64 = 1e-5;

/// Success threshold on the relative error for noisy problems.
pub const NOISY_SUCCESS_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Omp,
    Gomp,
    Domp,
    Edomp,
    Cosamp,
    Sp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Omp,
        Algorithm::Gomp,
        Algorithm::Domp,
        Algorithm::Edomp,
        Algorithm::Cosamp,
        Algorithm::Sp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Omp => "omp",
            Algorithm::Gomp => "gomp",
            Algorithm::Domp => "domp",
            Algorithm::Edomp => "edomp",
            Algorithm::Cosamp => "cosamp",
            Algorithm::Sp => "sp",
        }
    }

    pub fn uses_gamma(self) -> bool {
        matches!(self, Algorithm::Domp | Algorithm::Edomp)
    }

    /// Iterations run when the caller supplies neither a stopping rule nor a cap.
    pub fn default_budget(self, k: usize) -> usize {
        match self {
            Algorithm::Cosamp | Algorithm::Sp => BASELINE_ITERATION_CAP,
            _ => k,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown algorithm `{s}` (expected omp, gomp, domp, edomp, cosamp or sp)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "kebab-case")]
pub enum StoppingRule {
    /// Stop once `p` iterations have been run.
    MaxIterations(usize),
    /// Stop once `||y - A x||_2 <= eps`.
    MeasurementResidual(f64),
    /// Stop once `||A^T (y - A x)||_2 <= eps`.
    GradientResidual(f64),
    /// Stop once `||x - x_true||_2 / ||x_true||_2 <= eps`; needs the true signal.
    RelativeError(f64),
}

impl StoppingRule {
    fn tolerance(self) -> Option<f64> {
        match self {
            StoppingRule::MaxIterations(_) => None,
            StoppingRule::MeasurementResidual(e)
            | StoppingRule::GradientResidual(e)
            | StoppingRule::RelativeError(e) => Some(e),
        }
    }
}

impl fmt::Display for StoppingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StoppingRule::MaxIterations(p) => write!(f, "max-iter:{p}"),
            StoppingRule::MeasurementResidual(e) => write!(f, "residual:{e}"),
            StoppingRule::GradientResidual(e) => write!(f, "gradient:{e}"),
            StoppingRule::RelativeError(e) => write!(f, "relative:{e}"),
        }
    }
}

/// Parses `max-iter:N`, `residual:EPS`, `gradient:EPS` or `relative:EPS`.
impl FromStr for StoppingRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s.split_once(':').ok_or_else(|| {
            Error::invalid(format!("stopping rule `{s}` must look like KIND:VALUE"))
        })?;
        let value = value.trim();
        let eps = || -> Result<f64> {
            match value.parse::<f64>() {
                Ok(e) if e.is_finite() && e >= 0.0 => Ok(e),
                _ => Err(Error::invalid(format!(
                    "stopping tolerance `{value}` must be a finite number >= 0"
                ))),
            }
        };
        match kind.trim() {
            "max-iter" => value
                .parse()
                .map(StoppingRule::MaxIterations)
                .map_err(|_| Error::invalid(format!("iteration count `{value}` is not a count"))),
            "residual" => Ok(StoppingRule::MeasurementResidual(eps()?)),
            "gradient" => Ok(StoppingRule::GradientResidual(eps()?)),
            "relative" => Ok(StoppingRule::RelativeError(eps()?)),
            other => Err(Error::invalid(format!(
                "unknown stopping rule `{other}` (expected max-iter, residual, gradient or relative)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub algorithm: Algorithm,
    /// Sparsity level `k`.
    pub sparsity: usize,
    /// Relative selection threshold for DOMP and EDOMP.
    pub gamma: f64,
    /// Indices added per iteration by gOMP.
    pub group_size: usize,
    /// `None` runs the algorithm's default budget.
    pub stopping: Option<StoppingRule>,
    /// Hard cap on iterations for criterion-based rules.
    pub iteration_cap: Option<usize>,
    /// A gradient with `||r||_inf < zero_tolerance * ||A^T y||_inf` counts as zero.
    pub zero_tolerance: f64,
    /// EDOMP only: after thresholding, replace the support by the thresholded one.
    pub reset_support: bool,
    /// Relative error at or below which a run counts as a success.
    pub success_threshold: f64,
}

impl AlgorithmConfig {
    pub fn new(algorithm: Algorithm, sparsity: usize) -> Self {
        AlgorithmConfig {
            algorithm,
            sparsity,
            gamma: 0.9,
            group_size: 2,
            stopping: None,
            iteration_cap: None,
            zero_tolerance: 1e-13,
            reset_support: false,
            success_threshold: NOISELESS_SUCCESS_THRESHOLD,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_group_size(mut self, n: usize) -> Self {
        self.group_size = n;
        self
    }

    pub fn with_stopping(mut self, rule: StoppingRule) -> Self {
        self.stopping = Some(rule);
        self
    }

    pub fn with_iteration_cap(mut self, cap: usize) -> Self {
        self.iteration_cap = Some(cap);
        self
    }

    pub fn with_reset_support(mut self, reset: bool) -> Self {
        self.reset_support = reset;
        self
    }

    pub fn with_success_threshold(mut self, threshold: f64) -> Self {
        self.success_threshold = threshold;
        self
    }

    /// The rule actually applied: the configured one, or the default budget.
    pub fn effective_stopping(&self) -> StoppingRule {
        self.stopping.unwrap_or(StoppingRule::MaxIterations(
            self.algorithm.default_budget(self.sparsity),
        ))
    }

    /// Iteration cap actually applied.
    pub fn effective_cap(&self) -> usize {
        match self.effective_stopping() {
            StoppingRule::MaxIterations(p) => p,
            _ => self
                .iteration_cap
                .unwrap_or_else(|| self.algorithm.default_budget(self.sparsity)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sparsity == 0 {
            return Err(Error::invalid("sparsity k must be at least 1"));
        }
        if self.algorithm.uses_gamma() && !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::invalid(format!(
                "gamma must lie in (0, 1], got {}",
                self.gamma
            )));
        }
        if self.algorithm == Algorithm::Gomp
            && (self.group_size == 0 || self.group_size >= self.sparsity)
        {
            return Err(Error::invalid(format!(
                "gOMP group size N={} must satisfy 1 <= N < k={}",
                self.group_size, self.sparsity
            )));
        }
        if !(self.zero_tolerance >= 0.0 && self.zero_tolerance.is_finite()) {
            return Err(Error::invalid(
                "zero tolerance must be a finite number >= 0",
            ));
        }
        if !(self.success_threshold >= 0.0 && self.success_threshold.is_finite()) {
            return Err(Error::invalid(
                "success threshold must be a finite number >= 0",
            ));
        }
        if let Some(e) = self.stopping.and_then(StoppingRule::tolerance) {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(Error::invalid(
                    "stopping tolerance must be a finite number >= 0",
                ));
            }
        }
        Ok(())
    }
}
