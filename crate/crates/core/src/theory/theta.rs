use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Largest column count accepted by [`theta_exhaustive`].
pub const THETA_EXHAUSTIVE_MAX_COLS: usize = 20;

/// Worst best-fit residual over nonempty column supports,
/// `max_U min_{supp(z) in U} ||y - A z||_2`.
///
/// Enlarging `U` can only lower the inner minimum, so the maximum is reached
/// on a single column and equals the largest one-dimensional projection
/// residual. A zero column leaves `y` untouched.
pub fn theta_constant(a: &Matrix, y: &Vector) -> Result<f64> {
    if y.len() != a.rows() {
        return Err(Error::invalid(format!(
            "measurement length {} does not match the {} rows of the matrix",
            y.len(),
            a.rows()
        )));
    }
    let mut worst: f64 = 0.0;
    for j in 0..a.cols() {
        let col = a.column(j);
        let nn = col.dot(&col);
        let residual = if nn == 0.0 {
            y.norm()
        } else {
            (y - col * (col.dot(y) / nn)).norm()
        };
        worst = worst.max(residual);
    }
    Ok(worst)
}

/// The same quantity by brute force over all `2^n - 1` supports, each solved
/// through an SVD. Only meant as a check on [`theta_constant`].
pub fn theta_exhaustive(a: &Matrix, y: &Vector) -> Result<f64> {
    let n = a.cols();
    if n > THETA_EXHAUSTIVE_MAX_COLS {
        return Err(Error::invalid(format!(
            "exhaustive theta needs n <= {THETA_EXHAUSTIVE_MAX_COLS}, got {n}"
        )));
    }
    if y.len() != a.rows() {
        return Err(Error::invalid(
            "measurement length does not match the matrix",
        ));
    }
    let mut worst: f64 = 0.0;
    for mask in 1u32..(1u32 << n) {
        let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let sub = a.as_dmatrix().select_columns(&cols);
        let svd = sub.clone().svd(true, true);
        let eps = svd.singular_values.max() * 1e-12;
        let z = svd
            .solve(y, eps)
            .map_err(|e| Error::Numeric(e.to_string()))?;
        worst = worst.max((y - sub * z).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_matrix, gaussian_vector, rng_for};

    #[test]
    fn orthogonal_measurements_give_full_norm() {
        let a = Matrix::from_row_major(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let y = Vector::from_column_slice(&[0.0, 0.0, 2.5]);
        assert_eq!(theta_constant(&a, &y).unwrap(), 2.5);
    }

    #[test]
    fn single_column_in_span_gives_zero() {
        let a = Matrix::from_row_major(2, 1, &[3.0, 4.0]).unwrap();
        let y = Vector::from_column_slice(&[-1.5, -2.0]);
        assert!(theta_constant(&a, &y).unwrap() < 1e-15);
    }

    #[test]
    fn singleton_formula_matches_subset_search() {
        for seed in 0..10 {
            let mut rng = rng_for(seed, &[]);
            let a = gaussian_matrix(&mut rng, 6, 8, 1.0);
            let y = gaussian_vector(&mut rng, 6);
            let fast = theta_constant(&a, &y).unwrap();
            let slow = theta_exhaustive(&a, &y).unwrap();
            assert!((fast - slow).abs() <= 1e-10, "{fast} vs {slow}");
        }
    }

    #[test]
    fn zero_column_counts_as_no_fit() {
        let a = Matrix::from_row_major(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let y = Vector::from_column_slice(&[1.0, 1.0]);
        assert!((theta_constant(&a, &y).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }
}
