use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::random::{gaussian_matrix, gaussian_vector, rng_for, sparse_gaussian_vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnScaling {
    /// Plain standard-normal entries.
    #[default]
    Raw,
    /// Entries divided by `sqrt(m)`, so columns have unit norm on average.
    InverseSqrtM,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "model", content = "amplitude", rename_all = "kebab-case")]
pub enum NoiseModel {
    #[default]
    None,
    /// `y = A x + a h` with `h` standard normal.
    Gaussian(f64),
}

impl NoiseModel {
    pub fn from_amplitude(a: f64) -> Self {
        if a == 0.0 {
            NoiseModel::None
        } else {
            NoiseModel::Gaussian(a)
        }
    }

    pub fn amplitude(self) -> f64 {
        match self {
            NoiseModel::None => 0.0,
            NoiseModel::Gaussian(a) => a,
        }
    }
}

/// Random problem family: Gaussian `m x n` matrices and `k`-sparse signals
/// with standard-normal nonzeros.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub scaling: ColumnScaling,
    pub noise: NoiseModel,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(m: usize, n: usize, k: usize, seed: u64) -> Self {
        EnsembleSpec {
            m,
            n,
            k,
            scaling: ColumnScaling::Raw,
            noise: NoiseModel::None,
            seed,
        }
    }

    pub fn with_scaling(mut self, scaling: ColumnScaling) -> Self {
        self.scaling = scaling;
        self
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = noise;
        self
    }

    /// Rejects impossible sizes. Returns warnings for shapes outside
    /// `k <= m <= n`, which the experiments assume but the solvers accept.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::invalid("ensemble needs m >= 1 and n >= 1"));
        }
        if self.k > self.n {
            return Err(Error::invalid(format!(
                "sparsity k={} exceeds n={}",
                self.k, self.n
            )));
        }
        let a = self.noise.amplitude();
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::invalid(format!(
                "noise amplitude {a} must be finite and >= 0"
            )));
        }
        let mut warnings = Vec::new();
        if self.k > self.m || self.m > self.n {
            warnings.push(format!(
                "shape (m={}, n={}, k={}) is outside k <= m <= n",
                self.m, self.n, self.k
            ));
        }
        Ok(warnings)
    }
}

/// One sampled instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub a: Matrix,
    pub x: Vector,
    pub y: Vector,
}

/// Instance number `trial` of the ensemble. The generator is seeded from the
/// master seed and `(m, n, k, trial)` only, so every sweep that visits the
/// same shape sees the same instances, and adding trials leaves earlier ones
/// untouched.
pub fn generate_problem(spec: &EnsembleSpec, trial: usize) -> Problem {
    let mut rng = rng_for(
        spec.seed,
        &[spec.m as u64, spec.n as u64, spec.k as u64, trial as u64],
    );
    let scale = match spec.scaling {
        ColumnScaling::Raw => 1.0,
        ColumnScaling::InverseSqrtM => 1.0 / (spec.m as f64).sqrt(),
    };
    let a = gaussian_matrix(&mut rng, spec.m, spec.n, scale);
    let x = sparse_gaussian_vector(&mut rng, spec.n, spec.k);
    let mut y = a.apply(&x);
    if let NoiseModel::Gaussian(amp) = spec.noise {
        y += gaussian_vector(&mut rng, spec.m) * amp;
    }
    Problem { a, x, y }
}
