use serde::Serialize;

use super::sweep::{GammaSweep, IterationSweep, ScalingSweep, SparsitySweep};
use crate::algorithms::Algorithm;
use crate::error::{Error, Result};

/// Named experiment sizes. `Paper` is the full-size grid; `Desk` shrinks
/// the problem by four and the trial counts by ten so it runs in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Desk,
    Paper,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(Error::invalid(format!(
                "unknown preset `{other}` (expected desk or paper)"
            ))),
        }
    }
}

/// `t / 20` for `t = 1..=20`.
pub fn gamma_grid() -> Vec<f64> {
    (1..=20).map(|t| t as f64 / 20.0).collect()
}

const THRESHOLD_ALGORITHMS: [Algorithm; 2] = [Algorithm::Domp, Algorithm::Edomp];
const COMPARISON_ALGORITHMS: [Algorithm; 5] = [
    Algorithm::Omp,
    Algorithm::Domp,
    Algorithm::Edomp,
    Algorithm::Cosamp,
    Algorithm::Sp,
];

impl Preset {
    fn shape(self) -> (usize, usize) {
        match self {
            Preset::Desk => (125, 500),
            Preset::Paper => (500, 2000),
        }
    }

    fn threshold_sparsities(self) -> Vec<usize> {
        match self {
            Preset::Desk => vec![30, 35, 38, 40, 43, 45],
            Preset::Paper => vec![120, 140, 150, 160, 170, 180],
        }
    }

    /// Default trial count per cell for the named sweep.
    pub fn trials(self, sweep: &str) -> usize {
        match (self, sweep) {
            (Preset::Desk, "scaling") => 5,
            (Preset::Paper, "scaling") => 20,
            (Preset::Paper, "phase-k") => 200,
            (Preset::Desk, _) => 50,
            (Preset::Paper, _) => 500,
        }
    }

    pub fn gamma_sweep(self) -> GammaSweep {
        let (m, n) = self.shape();
        GammaSweep {
            m,
            n,
            ks: self.threshold_sparsities(),
            gammas: gamma_grid(),
            algorithms: THRESHOLD_ALGORITHMS.to_vec(),
        }
    }

    /// Budgets `1 + 3j`, up to 178 for the full grid and 46 at desk scale.
    pub fn iteration_sweep(self) -> IterationSweep {
        let (m, n) = self.shape();
        let last = match self {
            Preset::Desk => 15,
            Preset::Paper => 59,
        };
        IterationSweep {
            m,
            n,
            ks: self.threshold_sparsities(),
            budgets: (0..=last).map(|j| 1 + 3 * j).collect(),
            gamma: 0.9,
            algorithms: THRESHOLD_ALGORITHMS.to_vec(),
        }
    }

    /// `k = 1, 4, 7, ...` up to `0.6 m`.
    pub fn sparsity_sweep(self) -> SparsitySweep {
        let (m, n) = self.shape();
        SparsitySweep {
            m,
            n,
            ks: (1..m * 3 / 5).step_by(3).collect(),
            gamma: 0.9,
            algorithms: COMPARISON_ALGORITHMS.to_vec(),
        }
    }

    /// `m = 200 j`, `n = 5 m`, `k = 0.3 m`; five sizes at desk scale, ten on
    /// the full grid.
    pub fn scaling_sweep(self) -> ScalingSweep {
        let last = match self {
            Preset::Desk => 5,
            Preset::Paper => 10,
        };
        ScalingSweep {
            ms: (1..=last).map(|j| 200 * j).collect(),
            n_ratio: 5,
            k_fraction: 0.3,
            gamma: 0.9,
            algorithms: COMPARISON_ALGORITHMS.to_vec(),
        }
    }
}
