use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Default limit on the number of supports `ric_exact` will enumerate.
pub const RIC_ENUMERATION_CAP: u128 = 2_000_000;

const CHUNK: u128 = 2048;

/// Restricted isometry constant of one order, found by exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RicEstimate {
    pub order: usize,
    pub delta: f64,
    /// Smallest eigenvalue of `A_T^T A_T` over all supports.
    pub lambda_min: f64,
    /// Largest eigenvalue of `A_T^T A_T` over all supports.
    pub lambda_max: f64,
    pub method: &'static str,
    pub supports_examined: u128,
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The combination of rank `rank` in lexicographic order.
fn unrank(n: usize, q: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(q);
    let mut next = 0;
    for slot in 0..q {
        let mut c = next;
        loop {
            let below = binomial(n - c - 1, q - slot - 1);
            if rank < below {
                break;
            }
            rank -= below;
            c += 1;
        }
        out.push(c);
        next = c + 1;
    }
    out
}

/// Advances to the next combination; false after the last one.
fn advance(comb: &mut [usize], n: usize) -> bool {
    let q = comb.len();
    for i in (0..q).rev() {
        if comb[i] < n - q + i {
            comb[i] += 1;
            for j in i + 1..q {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn extreme_eigenvalues(gram: &DMatrix<f64>, support: &[usize]) -> (f64, f64) {
    if support.len() == 1 {
        let g = gram[(support[0], support[0])];
        return (g, g);
    }
    let sub = DMatrix::from_fn(support.len(), support.len(), |i, j| {
        gram[(support[i], support[j])]
    });
    let eig = SymmetricEigen::new(sub).eigenvalues;
    (eig.min(), eig.max())
}

fn check_order(a: &Matrix, q: usize, cap: u128) -> Result<u128> {
    let n = a.cols();
    if q == 0 || q > n {
        return Err(Error::invalid(format!(
            "RIC order q={q} must lie in [1, {n}]"
        )));
    }
    let count = binomial(n, q);
    if count > cap {
        return Err(Error::Capacity { n, q, count, cap });
    }
    Ok(count)
}

/// Exact RIC of order `q` with the default enumeration cap.
pub fn ric_exact(a: &Matrix, q: usize) -> Result<RicEstimate> {
    ric_exact_with_cap(a, q, RIC_ENUMERATION_CAP)
}

/// Exact RIC of order `q`: the largest deviation from 1 of any eigenvalue of
/// `A_T^T A_T` over all `|T| = q`. Supports are split into rank ranges that
/// are scanned in parallel; the combined min/max does not depend on the split.
pub fn ric_exact_with_cap(a: &Matrix, q: usize, cap: u128) -> Result<RicEstimate> {
    let count = check_order(a, q, cap)?;
    let n = a.cols();
    let gram = a.as_dmatrix().tr_mul(a.as_dmatrix());
    let chunks = count.div_ceil(CHUNK);
    let (lambda_min, lambda_max) = (0..chunks as u64)
        .into_par_iter()
        .map(|c| {
            let start = c as u128 * CHUNK;
            let end = (start + CHUNK).min(count);
            let mut comb = unrank(n, q, start);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for r in start..end {
                let (l, h) = extreme_eigenvalues(&gram, &comb);
                lo = lo.min(l);
                hi = hi.max(h);
                if r + 1 < end {
                    advance(&mut comb, n);
                }
            }
            (lo, hi)
        })
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |x, y| (x.0.min(y.0), x.1.max(y.1)),
        );
    Ok(RicEstimate {
        order: q,
        delta: (lambda_max - 1.0).max(1.0 - lambda_min).max(0.0),
        lambda_min,
        lambda_max,
        method: "exact-exhaustive",
        supports_examined: count,
    })
}

/// Exact RICs of orders `1..=max_order`.
pub fn ric_table(a: &Matrix, max_order: usize, cap: u128) -> Result<Vec<RicEstimate>> {
    (1..=max_order)
        .map(|q| ric_exact_with_cap(a, q, cap))
        .collect()
}

/// Largest `t` with `delta_t < 1`, or 0 when even `delta_1 >= 1`.
///
/// Orders are tried in increasing sequence and the sweep stops at the first
/// failure, relying on monotonicity of the RIC in its order.
pub fn highest_rip_order(a: &Matrix) -> Result<usize> {
    highest_rip_order_with_cap(a, RIC_ENUMERATION_CAP)
}

pub fn highest_rip_order_with_cap(a: &Matrix, cap: u128) -> Result<usize> {
    for t in 1..=a.cols() {
        if ric_exact_with_cap(a, t, cap)?.delta >= 1.0 {
            return Ok(t - 1);
        }
    }
    Ok(a.cols())
}
