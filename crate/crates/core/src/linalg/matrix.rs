use nalgebra::{DMatrix, DVectorView};

use super::{IndexSet, Vector};
use crate::error::{Error, Result};

const POWER_ITERATION_TOL: f64 = 1e-10;
const POWER_ITERATION_MAX: usize = 200_000;

/// Dense `m x n` measurement matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    data: DMatrix<f64>,
}

impl Matrix {
    /// Builds a matrix from entries listed row by row.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_dmatrix(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            // nalgebra storage is column-major
            let (r, c) = (pos % data.nrows(), pos / data.nrows());
            return Err(Error::invalid(format!(
                "matrix entry ({}, {}) is not finite",
                r + 1,
                c + 1
            )));
        }
        Ok(Matrix { data })
    }

    pub fn identity(n: usize) -> Self {
        Matrix {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn column(&self, j: usize) -> DVectorView<'_, f64> {
        self.data.column(j)
    }

    /// The column submatrix `A_S`, columns in increasing index order.
    pub fn select_columns(&self, support: &IndexSet) -> DMatrix<f64> {
        self.data.select_columns(support.as_slice())
    }

    /// `A x`.
    pub fn apply(&self, x: &Vector) -> Vector {
        &self.data * x
    }

    /// `A^T v`.
    pub fn apply_transpose(&self, v: &Vector) -> Vector {
        self.data.tr_mul(v)
    }

    /// Largest Euclidean column norm.
    pub fn max_column_norm(&self) -> f64 {
        self.data
            .column_iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Multiplies every entry by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_dmatrix(&self.data * factor)
    }

    /// Largest singular value, by power iteration on `A^T A`.
    ///
    /// Iteration stops once the eigen-residual `||A^T A v - lambda v||` drops
    /// below `1e-10 * lambda`.
    pub fn spectral_norm(&self) -> f64 {
        let n = self.cols();
        if self.data.iter().all(|&v| v == 0.0) {
            return 0.0;
        }
        let golden = 0.618_033_988_749_894_8_f64;
        let mut v = Vector::from_fn(n, |i, _| 1.0 + ((i + 1) as f64 * golden).fract());
        v /= v.norm();
        let mut lambda = 0.0;
        for _ in 0..POWER_ITERATION_MAX {
            let av = &self.data * &v;
            let w = self.data.tr_mul(&av);
            lambda = v.dot(&w);
            let residual = (&w - &v * lambda).norm();
            let norm = w.norm();
            if norm == 0.0 {
                // v landed in the null space; restart from a coordinate direction
                v = Vector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.0 });
                continue;
            }
            v = w / norm;
            if residual <= POWER_ITERATION_TOL * lambda.abs() {
                break;
            }
        }
        lambda.max(0.0).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(Matrix::from_row_major(0, 3, &[]).is_err());
        assert!(Matrix::from_row_major(2, 2, &[1.0, 2.0, 3.0]).is_err());
        assert!(Matrix::from_row_major(1, 2, &[1.0, f64::NAN]).is_err());
        assert!(Matrix::from_row_major(1, 2, &[f64::INFINITY, 0.0]).is_err());
    }

    #[test]
    fn row_major_layout() {
        let a = Matrix::from_row_major(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(a.as_dmatrix()[(0, 2)], 3.0);
        assert_eq!(a.as_dmatrix()[(1, 0)], 4.0);
    }

    #[test]
    fn spectral_norm_of_simple_matrices() {
        assert!((Matrix::identity(4).spectral_norm() - 1.0).abs() < 1e-12);
        let d = Matrix::from_row_major(2, 2, &[3.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((d.spectral_norm() - 3.0).abs() < 1e-9);
        let z = Matrix::from_row_major(2, 2, &[0.0; 4]).unwrap();
        assert_eq!(z.spectral_norm(), 0.0);
    }

    #[test]
    fn spectral_norm_matches_svd_on_random_matrix() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let entries: Vec<f64> = (0..40).map(|_| StandardNormal.sample(&mut rng)).collect();
            let a = Matrix::from_row_major(5, 8, &entries).unwrap();
            let svd = a.as_dmatrix().clone().svd(false, false);
            let top = svd.singular_values.max();
            let est = a.spectral_norm();
            assert!((est - top).abs() <= 1e-8 * top, "{est} vs {top}");
            assert!(est + 1e-12 >= a.max_column_norm());
        }
    }
}
