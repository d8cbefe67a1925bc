use nalgebra::DMatrix;

use super::{IndexSet, Matrix, Vector};
use crate::error::{Error, Result};

/// Condition estimate above which the QR path is abandoned for a truncated
/// SVD minimum-norm solve.
pub const CONDITION_LIMIT: f64 = 1e12;

fn diagonal_ratio<I: Iterator<Item = f64>>(diag: I) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for d in diag {
        lo = lo.min(d.abs());
        hi = hi.max(d.abs());
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Least-squares solution of `a z ~= b`.
///
/// Householder QR when `a` has at least as many rows as columns and the
/// diagonal of `R` indicates a condition number below [`CONDITION_LIMIT`];
/// otherwise the minimum-norm solution from a truncated SVD.
pub fn solve_dense_least_squares(a: &DMatrix<f64>, b: &Vector) -> Vector {
    let (m, s) = a.shape();
    if s == 0 {
        return Vector::zeros(0);
    }
    if s <= m {
        let qr = a.clone().qr();
        let r = qr.r();
        if diagonal_ratio(r.diagonal().iter().copied()) <= CONDITION_LIMIT {
            let mut qtb = b.clone();
            qr.q_tr_mul(&mut qtb);
            let head = qtb.rows(0, s).into_owned();
            if let Some(z) = r.solve_upper_triangular(&head) {
                return z;
            }
        }
    }
    minimum_norm_solve(a, b)
}

fn minimum_norm_solve(a: &DMatrix<f64>, b: &Vector) -> Vector {
    let s = a.ncols();
    let svd = a.clone().svd(true, true);
    let top = svd.singular_values.max();
    if top == 0.0 {
        return Vector::zeros(s);
    }
    svd.solve(b, top / CONDITION_LIMIT)
        .unwrap_or_else(|_| Vector::zeros(s))
}

fn check_problem(a: &Matrix, y: &Vector, support: &IndexSet) -> Result<()> {
    if y.len() != a.rows() {
        return Err(Error::invalid(format!(
            "measurement length {} does not match the {} rows of A",
            y.len(),
            a.rows()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("measurements contain non-finite values"));
    }
    if let Some(max) = support.max() {
        if max >= a.cols() {
            return Err(Error::invalid(format!(
                "support index {} exceeds the {} columns of A",
                max + 1,
                a.cols()
            )));
        }
    }
    Ok(())
}

fn scatter(n: usize, support: &IndexSet, coeffs: &Vector) -> Vector {
    let mut x = Vector::zeros(n);
    for (pos, i) in support.iter().enumerate() {
        x[i] = coeffs[pos];
    }
    x
}

/// `A^T (y - A x)`.
pub fn residual_gradient(a: &Matrix, y: &Vector, x: &Vector) -> Result<Vector> {
    if y.len() != a.rows() || x.len() != a.cols() {
        return Err(Error::invalid(format!(
            "dimension mismatch: A is {}x{}, y has length {}, x has length {}",
            a.rows(),
            a.cols(),
            y.len(),
            x.len()
        )));
    }
    Ok(a.apply_transpose(&(y - a.apply(x))))
}

/// Minimizer of `||y - A z||_2` over vectors supported on `support`
/// (minimum-norm minimizer when `A_S` is rank deficient).
pub fn restricted_least_squares(a: &Matrix, y: &Vector, support: &IndexSet) -> Result<Vector> {
    check_problem(a, y, support)?;
    if support.is_empty() {
        return Ok(Vector::zeros(a.cols()));
    }
    let sub = a.select_columns(support);
    let coeffs = solve_dense_least_squares(&sub, y);
    Ok(scatter(a.cols(), support, &coeffs))
}

/// Minimizer of `||y - A z||_2^2 + sigma ||z_penalized||_2^2` over vectors
/// supported on `support`, where `penalized` must be a subset of `support`.
///
/// Solved as an augmented least-squares problem with rows `sqrt(sigma) e_i^T`
/// appended for each penalized index.
pub fn penalized_restricted_ls(
    a: &Matrix,
    y: &Vector,
    support: &IndexSet,
    penalized: &IndexSet,
    sigma: f64,
) -> Result<Vector> {
    check_problem(a, y, support)?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!(
            "penalty sigma must be positive, got {sigma}"
        )));
    }
    if !penalized.is_subset(support) {
        return Err(Error::invalid(
            "penalized index set must be contained in the support",
        ));
    }
    if penalized.is_empty() {
        return restricted_least_squares(a, y, support);
    }
    let m = a.rows();
    let s = support.len();
    let root = sigma.sqrt();
    let mut aug = DMatrix::zeros(m + penalized.len(), s);
    aug.view_mut((0, 0), (m, s))
        .copy_from(&a.select_columns(support));
    for (row, i) in penalized.iter().enumerate() {
        let col = support
            .as_slice()
            .binary_search(&i)
            .expect("penalized index inside support");
        aug[(m + row, col)] = root;
    }
    let mut rhs = Vector::zeros(m + penalized.len());
    rhs.rows_mut(0, m).copy_from(y);
    let coeffs = solve_dense_least_squares(&aug, &rhs);
    Ok(scatter(a.cols(), support, &coeffs))
}

/// Least-squares projector over a growing support.
///
/// Keeps a thin QR factorization of `A_S` (modified Gram-Schmidt with one
/// reorthogonalization pass), so adding a column costs `O(m |S|)`. Once the
/// support becomes numerically rank deficient, or wider than `m`, the
/// factorization is dropped and every solve goes through
/// [`restricted_least_squares`].
#[derive(Debug, Clone)]
pub struct SupportProjector<'a> {
    matrix: &'a Matrix,
    y: &'a Vector,
    support: IndexSet,
    order: Vec<usize>,
    basis: Vec<Vector>,
    r_columns: Vec<Vec<f64>>,
    qty: Vec<f64>,
    diag_min: f64,
    diag_max: f64,
    degenerate: bool,
}

impl<'a> SupportProjector<'a> {
    pub fn new(matrix: &'a Matrix, y: &'a Vector) -> Self {
        SupportProjector {
            matrix,
            y,
            support: IndexSet::empty(),
            order: Vec::new(),
            basis: Vec::new(),
            r_columns: Vec::new(),
            qty: Vec::new(),
            diag_min: f64::INFINITY,
            diag_max: 0.0,
            degenerate: false,
        }
    }

    pub fn support(&self) -> &IndexSet {
        &self.support
    }

    /// True once the factorization has been abandoned for the SVD path.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Adds the columns of `cols` not yet in the support, in increasing order.
    pub fn extend(&mut self, cols: &IndexSet) {
        for j in cols.iter() {
            if self.support.contains(j) {
                continue;
            }
            self.support = self.support.union(&IndexSet::new(vec![j]));
            if !self.degenerate {
                self.push_column(j);
            }
        }
    }

    fn push_column(&mut self, j: usize) {
        if self.basis.len() >= self.matrix.rows() {
            self.degenerate = true;
            return;
        }
        let mut w = self.matrix.column(j).clone_owned();
        let mut h = vec![0.0; self.basis.len()];
        for _ in 0..2 {
            for (k, q) in self.basis.iter().enumerate() {
                let c = q.dot(&w);
                h[k] += c;
                w.axpy(-c, q, 1.0);
            }
        }
        let diag = w.norm();
        let lo = self.diag_min.min(diag);
        let hi = self.diag_max.max(diag);
        if diag == 0.0 || hi / lo > CONDITION_LIMIT {
            self.degenerate = true;
            return;
        }
        self.diag_min = lo;
        self.diag_max = hi;
        w /= diag;
        self.qty.push(w.dot(self.y));
        h.push(diag);
        self.r_columns.push(h);
        self.basis.push(w);
        self.order.push(j);
    }

    /// The least-squares solution on the current support, as a length-`n` vector.
    pub fn solution(&self) -> Vector {
        let n = self.matrix.cols();
        if self.degenerate {
            return restricted_least_squares(self.matrix, self.y, &self.support)
                .expect("support validated on insertion");
        }
        let s = self.order.len();
        let mut coeffs = vec![0.0; s];
        for row in (0..s).rev() {
            let mut acc = self.qty[row];
            for (col, c) in coeffs.iter().enumerate().skip(row + 1) {
                acc -= self.r_columns[col][row] * c;
            }
            coeffs[row] = acc / self.r_columns[row][row];
        }
        let mut x = Vector::zeros(n);
        for (pos, &j) in self.order.iter().enumerate() {
            x[j] = coeffs[pos];
        }
        x
    }
}
