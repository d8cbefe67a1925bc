use std::cmp::Ordering;

use super::{IndexSet, Vector};
use crate::error::{Error, Result};

/// Larger magnitude first; on exactly equal magnitudes the smaller index wins.
fn magnitude_order(v: &Vector, i: usize, j: usize) -> Ordering {
    v[j].abs().total_cmp(&v[i].abs()).then(i.cmp(&j))
}

/// Indices of the `q` largest magnitudes of `v`.
///
/// Magnitudes are compared exactly, with no tolerance; ties at the selection
/// boundary go to the smaller index.
pub fn top_q_indices(v: &Vector, q: usize) -> Result<IndexSet> {
    if q == 0 || q > v.len() {
        return Err(Error::invalid(format!(
            "selection size q={q} must lie in [1, {}]",
            v.len()
        )));
    }
    let mut idx: Vec<usize> = (0..v.len()).collect();
    if q < idx.len() {
        idx.select_nth_unstable_by(q - 1, |&i, &j| magnitude_order(v, i, j));
        idx.truncate(q);
    }
    Ok(IndexSet::new(idx))
}

/// Keeps the `k` largest magnitudes of `v` and zeroes the rest.
pub fn hard_threshold(v: &Vector, k: usize) -> Result<Vector> {
    if k > v.len() {
        return Err(Error::invalid(format!(
            "threshold level k={k} exceeds vector length {}",
            v.len()
        )));
    }
    if k == 0 {
        return Ok(Vector::zeros(v.len()));
    }
    let keep = top_q_indices(v, k)?;
    restrict_to_support(v, &keep)
}

/// `v` with every entry outside `support` set to zero.
pub fn restrict_to_support(v: &Vector, support: &IndexSet) -> Result<Vector> {
    if let Some(max) = support.max() {
        if max >= v.len() {
            return Err(Error::invalid(format!(
                "support index {} is out of range for length {}",
                max + 1,
                v.len()
            )));
        }
    }
    let mut out = Vector::zeros(v.len());
    for i in support {
        out[i] = v[i];
    }
    Ok(out)
}

/// Indices of the nonzero entries.
pub fn support_of(v: &Vector) -> IndexSet {
    IndexSet::new(
        v.iter()
            .enumerate()
            .filter(|(_, x)| **x != 0.0)
            .map(|(i, _)| i)
            .collect(),
    )
}
