use super::state::IterateState;
use crate::error::{Error, Result};
use crate::linalg::{
    max_abs, restricted_least_squares, top_q_indices, IndexSet, Matrix, SupportProjector, Vector,
};

/// Indices of `L_k(r)` whose magnitude is at least `gamma * ||r||_inf`.
///
/// The result always holds a maximum-magnitude index. A zero `r` yields
/// [`Error::ZeroResidual`], which callers treat as a stop signal.
pub fn select_dynamic_indices(r: &Vector, k: usize, gamma: f64) -> Result<IndexSet> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    if k == 0 || k > r.len() {
        return Err(Error::invalid(format!(
            "sparsity k={k} must lie in [1, {}]",
            r.len()
        )));
    }
    let peak = max_abs(r);
    if peak == 0.0 {
        return Err(Error::ZeroResidual);
    }
    let level = gamma * peak;
    let top = top_q_indices(r, k)?;
    Ok(top.iter().filter(|&i| r[i].abs() >= level).collect())
}

/// The `q` largest magnitudes of `r` among `candidates`, smaller index first on ties.
fn top_among(r: &Vector, candidates: impl Iterator<Item = usize>, q: usize) -> IndexSet {
    let mut idx: Vec<usize> = candidates.collect();
    idx.sort_by(|&i, &j| r[j].abs().total_cmp(&r[i].abs()).then(i.cmp(&j)));
    idx.truncate(q);
    IndexSet::new(idx)
}

/// Problem data shared by every step of a run.
#[derive(Clone)]
pub(crate) struct Context<'a> {
    pub a: &'a Matrix,
    pub y: &'a Vector,
    zero_level: f64,
}

impl<'a> Context<'a> {
    pub fn new(a: &'a Matrix, y: &'a Vector, zero_tolerance: f64) -> Result<Self> {
        if y.len() != a.rows() {
            return Err(Error::invalid(format!(
                "measurement length {} does not match the {} rows of the matrix",
                y.len(),
                a.rows()
            )));
        }
        let scale = max_abs(&a.apply_transpose(y));
        Ok(Context {
            a,
            y,
            zero_level: zero_tolerance * scale,
        })
    }

    /// True when `r` is zero or below the noise floor relative to `A^T y`.
    pub fn gradient_vanishes(&self, r: &Vector) -> bool {
        let peak = max_abs(r);
        peak == 0.0 || peak < self.zero_level
    }

    fn estimate(
        &self,
        x: Vector,
        support: IndexSet,
        projection: IndexSet,
        prev: &IterateState,
        selected: IndexSet,
        thresholded: bool,
    ) -> IterateState {
        IterateState::from_estimate(
            self.a,
            self.y,
            x,
            support,
            projection,
            prev.iteration + 1,
            selected,
            thresholded,
        )
    }
}

/// Least-squares backend for supports that only grow.
pub(crate) enum Solver<'a> {
    /// Fresh factorization for every solve.
    Batch,
    /// Incremental QR carried across iterations.
    Incremental(SupportProjector<'a>),
}

impl<'a> Solver<'a> {
    pub fn incremental(ctx: &Context<'a>) -> Self {
        Solver::Incremental(SupportProjector::new(ctx.a, ctx.y))
    }

    fn solve_grown(
        &mut self,
        ctx: &Context<'a>,
        support: &IndexSet,
        added: &IndexSet,
    ) -> Result<Vector> {
        match self {
            Solver::Batch => restricted_least_squares(ctx.a, ctx.y, support),
            Solver::Incremental(p) => {
                p.extend(added);
                debug_assert_eq!(p.support(), support);
                Ok(p.solution())
            }
        }
    }

    fn restart(&mut self, ctx: &Context<'a>, support: &IndexSet) {
        if let Solver::Incremental(p) = self {
            *p = SupportProjector::new(ctx.a, ctx.y);
            p.extend(support);
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Selection {
    /// `L_1(r)`, as in OMP.
    Single,
    /// The `N` largest entries of `r` outside the support, as in gOMP.
    Group(usize),
    /// The dynamic set of DOMP and EDOMP.
    Dynamic { k: usize, gamma: f64 },
}

impl Selection {
    fn choose(self, state: &IterateState) -> Result<IndexSet> {
        let r = &state.gradient;
        match self {
            Selection::Single => top_q_indices(r, 1),
            Selection::Group(n) => Ok(top_among(
                r,
                (0..r.len()).filter(|&i| !state.support.contains(i)),
                n,
            )),
            Selection::Dynamic { k, gamma } => select_dynamic_indices(r, k, gamma),
        }
    }
}

/// EDOMP thresholding settings.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Thresholding {
    pub k: usize,
    pub reset_support: bool,
}

/// One greedy iteration: select, grow the support, project, and for EDOMP
/// threshold back to `k` entries when the support has grown past `k`.
pub(crate) fn greedy_step<'a>(
    ctx: &Context<'a>,
    solver: &mut Solver<'a>,
    state: &IterateState,
    selection: Selection,
    thresholding: Option<Thresholding>,
) -> Result<IterateState> {
    if ctx.gradient_vanishes(&state.gradient) {
        return Err(Error::ZeroResidual);
    }
    let selected = selection.choose(state)?;
    let added = selected.difference(&state.support);
    let support = state.support.union(&selected);
    let x_tilde = solver.solve_grown(ctx, &support, &added)?;
    match thresholding {
        Some(t) if support.len() > t.k => {
            let q = top_q_indices(&x_tilde, t.k)?;
            let x = restricted_least_squares(ctx.a, ctx.y, &q)?;
            let support = if t.reset_support {
                solver.restart(ctx, &q);
                q.clone()
            } else {
                support
            };
            Ok(ctx.estimate(x, support, q, state, selected, true))
        }
        _ => Ok(ctx.estimate(x_tilde, support.clone(), support, state, selected, false)),
    }
}

fn check_state(a: &Matrix, state: &IterateState) -> Result<()> {
    if state.x.len() != a.cols() || state.gradient.len() != a.cols() {
        return Err(Error::invalid("iterate length does not match the matrix"));
    }
    if state.support.max().is_some_and(|j| j >= a.cols()) {
        return Err(Error::invalid("support index out of range"));
    }
    Ok(())
}

fn pure_step(
    state: &IterateState,
    a: &Matrix,
    y: &Vector,
    selection: Selection,
    thresholding: Option<Thresholding>,
) -> Result<IterateState> {
    check_state(a, state)?;
    let ctx = Context::new(a, y, 1e-13)?;
    greedy_step(&ctx, &mut Solver::Batch, state, selection, thresholding)
}

/// One OMP iteration: add `L_1(r)` to the support and re-project.
pub fn omp_step(state: &IterateState, a: &Matrix, y: &Vector) -> Result<IterateState> {
    pure_step(state, a, y, Selection::Single, None)
}

/// One gOMP iteration adding the `n` largest gradient entries outside the support.
pub fn gomp_step(state: &IterateState, a: &Matrix, y: &Vector, n: usize) -> Result<IterateState> {
    if n == 0 {
        return Err(Error::invalid("gOMP group size must be at least 1"));
    }
    pure_step(state, a, y, Selection::Group(n), None)
}

/// One DOMP iteration: add every index of `L_k(r)` within a factor `gamma`
/// of the largest gradient magnitude, then re-project.
pub fn domp_step(
    state: &IterateState,
    a: &Matrix,
    y: &Vector,
    k: usize,
    gamma: f64,
) -> Result<IterateState> {
    pure_step(state, a, y, Selection::Dynamic { k, gamma }, None)
}

/// One EDOMP iteration: a DOMP step, followed when the support exceeds `k`
/// by a projection onto the `k` largest entries of the DOMP estimate.
///
/// With `reset_support = false` the support keeps accumulating after
/// thresholding; with `true` it is replaced by the thresholded set.
pub fn edomp_step(
    state: &IterateState,
    a: &Matrix,
    y: &Vector,
    k: usize,
    gamma: f64,
    reset_support: bool,
) -> Result<IterateState> {
    pure_step(
        state,
        a,
        y,
        Selection::Dynamic { k, gamma },
        Some(Thresholding { k, reset_support }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn dynamic_selection_examples() {
        let s = select_dynamic_indices(&v(&[5.0, 4.8, 0.1]), 3, 0.9).unwrap();
        assert_eq!(s.as_slice(), &[0, 1]);
        let s = select_dynamic_indices(&v(&[1.0, -7.0, 6.9, 2.0]), 4, 1.0).unwrap();
        assert_eq!(s.as_slice(), &[1]);
        let s = select_dynamic_indices(&v(&[3.0, -3.0, 1.0]), 2, 1.0).unwrap();
        assert_eq!(s.as_slice(), &[0, 1]);
        // only L_k is eligible even if more entries clear the threshold
        let s = select_dynamic_indices(&v(&[1.0, 1.0, 1.0]), 2, 0.5).unwrap();
        assert_eq!(s.as_slice(), &[0, 1]);
    }

    #[test]
    fn dynamic_selection_errors() {
        assert!(matches!(
            select_dynamic_indices(&v(&[0.0, 0.0]), 1, 0.5),
            Err(Error::ZeroResidual)
        ));
        assert!(select_dynamic_indices(&v(&[1.0]), 1, 0.0).is_err());
        assert!(select_dynamic_indices(&v(&[1.0]), 1, 1.5).is_err());
        assert!(select_dynamic_indices(&v(&[1.0]), 2, 0.5).is_err());
        assert!(select_dynamic_indices(&v(&[1.0]), 0, 0.5).is_err());
    }

    #[test]
    fn omp_on_identity_recovers_unit_vector() {
        let a = Matrix::identity(4);
        let y = v(&[0.0, 0.0, 1.0, 0.0]);
        let s0 = IterateState::initial(&a, &y).unwrap();
        let s1 = omp_step(&s0, &a, &y).unwrap();
        assert_eq!(s1.support.as_slice(), &[2]);
        assert!((&s1.x - &y).amax() < 1e-15);
        assert_eq!(s1.iteration, 1);
        assert!(s1.residual_norm < 1e-15);
    }

    #[test]
    fn domp_on_identity_takes_all_comparable_entries_at_once() {
        let a = Matrix::identity(6);
        let y = v(&[0.0, 2.0, 0.0, -1.9, 0.0, 1.85]);
        let s0 = IterateState::initial(&a, &y).unwrap();
        let s1 = domp_step(&s0, &a, &y, 3, 0.9).unwrap();
        assert_eq!(s1.support.as_slice(), &[1, 3, 5]);
        assert!((s1.x.clone() - &y).norm() < 1e-15);
    }

    #[test]
    fn edomp_thresholds_to_k_largest_and_reprojects() {
        // columns 0..3 of the identity plus a column mixing e0 and e1
        let a = Matrix::from_row_major(
            3,
            4,
            &[
                1.0, 0.0, 0.0, 0.6, //
                0.0, 1.0, 0.0, 0.8, //
                0.0, 0.0, 1.0, 0.0,
            ],
        )
        .unwrap();
        let y = v(&[3.0, 4.0, 0.1]);
        let s0 = IterateState::initial(&a, &y).unwrap();
        // r = [3, 4, 0.1, 5], so the first step takes L_2(r) = {1, 3}
        let s1 = edomp_step(&s0, &a, &y, 2, 0.55, false).unwrap();
        assert_eq!(s1.support.as_slice(), &[1, 3]);
        assert!(!s1.thresholded);
        // the residual is now 0.1 e2, so the support grows to three entries
        let s2 = edomp_step(&s1, &a, &y, 2, 0.55, false).unwrap();
        assert_eq!(s2.selected.as_slice(), &[2]);
        assert!(s2.thresholded);
        assert_eq!(s2.support.as_slice(), &[1, 2, 3]);
        assert_eq!(s2.projection_support.as_slice(), &[2, 3]);
        assert!(s2.x.iter().filter(|e| **e != 0.0).count() <= 2);
        let ls = restricted_least_squares(&a, &y, &s2.projection_support).unwrap();
        assert_eq!(s2.x, ls);

        let reset = edomp_step(&s1, &a, &y, 2, 0.55, true).unwrap();
        assert_eq!(reset.support.as_slice(), &[2, 3]);
        assert_eq!(reset.x, s2.x);
    }

    #[test]
    fn edomp_matches_domp_while_support_is_small() {
        let a = Matrix::identity(5);
        let y = v(&[1.0, 0.0, 0.95, 0.0, 0.0]);
        let s0 = IterateState::initial(&a, &y).unwrap();
        let d = domp_step(&s0, &a, &y, 3, 0.9).unwrap();
        let e = edomp_step(&s0, &a, &y, 3, 0.9, false).unwrap();
        assert_eq!(d, e);
    }

    #[test]
    fn gomp_skips_indices_already_in_support() {
        let a = Matrix::identity(4);
        let y = v(&[4.0, 3.0, 2.0, 1.0]);
        let s0 = IterateState::initial(&a, &y).unwrap();
        let s1 = gomp_step(&s0, &a, &y, 2).unwrap();
        assert_eq!(s1.support.as_slice(), &[0, 1]);
        let s2 = gomp_step(&s1, &a, &y, 2).unwrap();
        assert_eq!(s2.selected.as_slice(), &[2, 3]);
    }
}
