mod common;

use common::normalized_problem;
use domp::algorithms::{
    domp_step, edomp_step, omp_step, run, Algorithm, AlgorithmConfig, IterateState, StoppingRule,
    Termination,
};
use domp::linalg::{max_abs, IndexSet, Matrix, Vector};

fn crc(alg: Algorithm, k: usize) -> AlgorithmConfig {
    AlgorithmConfig::new(alg, k).with_stopping(StoppingRule::RelativeError(1e-5))
}

fn success_count(alg: Algorithm, trials: u64, m: usize, n: usize, k: usize, base: u64) -> usize {
    (0..trials)
        .filter(|t| {
            let (a, x, y) = normalized_problem(base + t, m, n, k);
            run(&a, &y, Some(&x), &crc(alg, k))
                .unwrap()
                .success
                .unwrap()
        })
        .count()
}

/// Smallest residual over every support of size `k`, each solved through
/// nalgebra's SVD rather than the library's least-squares path.
fn best_subset_residual(a: &Matrix, y: &Vector, k: usize) -> f64 {
    fn rec(
        a: &Matrix,
        y: &Vector,
        k: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        best: &mut f64,
    ) {
        if chosen.len() == k {
            let sub = a.as_dmatrix().select_columns(chosen.as_slice());
            let svd = sub.clone().svd(true, true);
            let z = svd.solve(y, 1e-12).unwrap();
            *best = best.min((y - sub * z).norm());
            return;
        }
        for j in start..a.cols() {
            chosen.push(j);
            rec(a, y, k, j + 1, chosen, best);
            chosen.pop();
        }
    }
    let mut best = f64::INFINITY;
    rec(a, y, k, 0, &mut Vec::new(), &mut best);
    best
}

/// The exhaustive optimum is a lower bound on every 3-sparse fit, and OMP
/// attains it exactly on the instances it recovers.
#[test]
fn omp_against_exhaustive_best_support() {
    let seeds = 20;
    let mut optimal = 0;
    for seed in 0..seeds {
        let (a, x, y) = normalized_problem(1000 + seed, 20, 40, 3);
        let report = run(&a, &y, Some(&x), &AlgorithmConfig::new(Algorithm::Omp, 3)).unwrap();
        let best = best_subset_residual(&a, &y, 3);
        let omp = report.final_state.residual_norm;
        assert!(
            best <= omp + 1e-10,
            "seed {seed}: oracle {best} above omp {omp}"
        );
        if omp <= best + 1e-8 {
            optimal += 1;
            assert!(report.relative_error.unwrap() <= 1e-8, "seed {seed}");
        }
    }
    assert!(
        optimal * 10 >= seeds * 8,
        "omp optimal on {optimal}/{seeds}"
    );
}

#[test]
fn omp_recovers_support_in_exactly_k_steps() {
    for seed in 0..20 {
        let (a, x, y) = normalized_problem(2000 + seed, 80, 160, 4);
        let report = run(&a, &y, Some(&x), &AlgorithmConfig::new(Algorithm::Omp, 4)).unwrap();
        if report.success.unwrap() {
            assert_eq!(report.iterations, 4);
            let truth: IndexSet = (0..160).filter(|&i| x[i] != 0.0).collect();
            assert_eq!(report.final_state.support, truth);
        }
    }
}

#[test]
fn domp_monte_carlo_success() {
    let wins = success_count(Algorithm::Domp, 100, 100, 400, 10, 10_000);
    assert!(wins >= 95, "DOMP succeeded in {wins}/100");
}

#[test]
fn edomp_close_to_domp() {
    let d = success_count(Algorithm::Domp, 100, 100, 400, 10, 10_000);
    let e = success_count(Algorithm::Edomp, 100, 100, 400, 10, 10_000);
    assert!(e + 5 >= d, "EDOMP {e} vs DOMP {d}");
}

#[test]
fn cosamp_and_sp_monte_carlo_success() {
    for alg in [Algorithm::Cosamp, Algorithm::Sp] {
        let wins = success_count(alg, 100, 100, 400, 10, 10_000);
        assert!(wins >= 90, "{alg} succeeded in {wins}/100");
    }
}

#[test]
fn gomp_close_to_omp_at_equal_iteration_budget() {
    let trials = 200;
    let omp = success_count(Algorithm::Omp, trials, 50, 200, 6, 30_000);
    let gomp = (0..trials)
        .filter(|t| {
            let (a, x, y) = normalized_problem(30_000 + t, 50, 200, 6);
            let cfg = crc(Algorithm::Gomp, 6).with_group_size(2);
            run(&a, &y, Some(&x), &cfg).unwrap().success.unwrap()
        })
        .count();
    let (p, q) = (omp as f64 / trials as f64, gomp as f64 / trials as f64);
    assert!((p - q).abs() <= 0.1, "OMP {p} vs gOMP {q}");
}

#[test]
fn gomp_with_one_index_per_step_is_omp() {
    for seed in 0..10 {
        let (a, _, y) = normalized_problem(40_000 + seed, 30, 60, 5);
        let omp = run(&a, &y, None, &AlgorithmConfig::new(Algorithm::Omp, 5)).unwrap();
        let cfg = AlgorithmConfig::new(Algorithm::Gomp, 5).with_group_size(1);
        let gomp = run(&a, &y, None, &cfg).unwrap();
        let sel = |r: &domp::algorithms::AlgorithmReport| {
            r.trace
                .iter()
                .map(|t| t.selected.clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(sel(&omp), sel(&gomp));
    }
}

#[test]
fn identity_matrix_cases() {
    let a = Matrix::identity(8);
    let mut y = Vector::zeros(8);
    y[1] = 3.0;
    y[4] = -2.0;
    y[6] = 1.0;
    let k = 3;
    let g = run(
        &a,
        &y,
        Some(&y),
        &AlgorithmConfig::new(Algorithm::Gomp, k).with_group_size(2),
    )
    .unwrap();
    assert!(g.iterations <= 2 && g.success.unwrap());
    for alg in [Algorithm::Cosamp, Algorithm::Sp] {
        let r = run(&a, &y, Some(&y), &AlgorithmConfig::new(alg, k)).unwrap();
        assert!(r.success.unwrap(), "{alg}");
        assert!((&r.final_state.x - &y).norm() < 1e-14, "{alg}");
        assert_eq!(r.trace.len(), 1, "{alg}");
    }
}

#[test]
fn zero_measurements_return_zero_immediately() {
    let (a, _, _) = normalized_problem(5, 10, 20, 2);
    let y = Vector::zeros(10);
    for alg in [
        Algorithm::Omp,
        Algorithm::Domp,
        Algorithm::Edomp,
        Algorithm::Cosamp,
        Algorithm::Sp,
    ] {
        let r = run(&a, &y, None, &AlgorithmConfig::new(alg, 2)).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.termination, Termination::GlobalOptimum);
        assert_eq!(r.final_state.x, Vector::zeros(20));
    }
    let cfg = AlgorithmConfig::new(Algorithm::Domp, 2)
        .with_stopping(StoppingRule::GradientResidual(1e-9));
    let r = run(&a, &y, None, &cfg).unwrap();
    assert_eq!(
        (r.iterations, r.termination),
        (0, Termination::CriterionMet)
    );
}

#[test]
fn zero_budget_returns_initial_iterate() {
    let (a, x, y) = normalized_problem(6, 10, 20, 2);
    let cfg = AlgorithmConfig::new(Algorithm::Omp, 2).with_stopping(StoppingRule::MaxIterations(0));
    let r = run(&a, &y, Some(&x), &cfg).unwrap();
    assert_eq!(r.iterations, 0);
    assert!(r.trace.is_empty());
    assert_eq!(r.final_state.x, Vector::zeros(20));
    assert_eq!(r.termination, Termination::MaxIterations);
}

#[test]
fn domp_relative_error_rule_stops_within_k() {
    let (a, x, y) = normalized_problem(7, 100, 400, 10);
    let r = run(&a, &y, Some(&x), &crc(Algorithm::Domp, 10)).unwrap();
    assert!(r.success.unwrap());
    assert!(r.iterations <= 10);
    assert_eq!(r.trace.len(), r.iterations);
}

#[test]
fn run_is_deterministic() {
    let (a, x, y) = normalized_problem(8, 60, 120, 8);
    for alg in [Algorithm::Domp, Algorithm::Edomp, Algorithm::Sp] {
        let r1 = run(&a, &y, Some(&x), &crc(alg, 8)).unwrap();
        let r2 = run(&a, &y, Some(&x), &crc(alg, 8)).unwrap();
        assert_eq!(r1.final_state, r2.final_state);
        assert_eq!(r1.trace, r2.trace);
    }
}

#[test]
fn run_rejects_invalid_input() {
    let (a, x, y) = normalized_problem(9, 10, 20, 2);
    let bad_gamma = AlgorithmConfig::new(Algorithm::Domp, 2).with_gamma(1.3);
    assert!(run(&a, &y, None, &bad_gamma).is_err());
    assert!(run(
        &a,
        &Vector::zeros(9),
        None,
        &AlgorithmConfig::new(Algorithm::Omp, 2)
    )
    .is_err());
    assert!(run(
        &a,
        &y,
        Some(&Vector::zeros(3)),
        &AlgorithmConfig::new(Algorithm::Omp, 2)
    )
    .is_err());
    assert!(run(&a, &y, None, &crc(Algorithm::Omp, 2)).is_err());
    assert!(run(&a, &y, None, &AlgorithmConfig::new(Algorithm::Omp, 21)).is_err());
    let wide = AlgorithmConfig::new(Algorithm::Omp, 12);
    let r = run(&a, &y, Some(&x), &wide).unwrap();
    assert!(!r.warnings.is_empty());
}

#[test]
fn criterion_rules_hit_the_cap() {
    let (a, x, y) = normalized_problem(10, 20, 80, 15);
    let cfg = AlgorithmConfig::new(Algorithm::Omp, 15)
        .with_stopping(StoppingRule::MeasurementResidual(0.0))
        .with_iteration_cap(3);
    let r = run(&a, &y, Some(&x), &cfg).unwrap();
    assert_eq!(
        (r.iterations, r.termination),
        (3, Termination::IterationCap)
    );
}

#[test]
fn sp_residual_increase_keeps_previous_iterate() {
    let mut seen = 0;
    for seed in 0..3000 {
        let (a, _, y) = normalized_problem(50_000 + seed, 12, 30, 5);
        let cfg = AlgorithmConfig::new(Algorithm::Sp, 5);
        let r = run(&a, &y, None, &cfg).unwrap();
        for w in r.trace.windows(2) {
            assert!(w[1].residual_norm <= w[0].residual_norm);
        }
        if r.termination == Termination::ResidualIncrease {
            seen += 1;
            assert_eq!(r.trace.len(), r.iterations);
            assert_eq!(
                r.trace.last().unwrap().residual_norm,
                r.final_state.residual_norm
            );
        }
        if seen >= 5 {
            break;
        }
    }
    assert!(seen > 0, "no residual increase found in the seed range");
}

fn optimality_gap(a: &Matrix, y: &Vector, s: &IterateState, on: &IndexSet) -> f64 {
    let aty = max_abs(&a.apply_transpose(y));
    let worst = on.iter().map(|i| s.gradient[i].abs()).fold(0.0, f64::max);
    worst / (1.0 + aty)
}

/// Steps DOMP and EDOMP (both modes) through seeded instances and checks the
/// per-iteration invariants.
#[test]
fn step_invariants() {
    for seed in 0..40 {
        let k = 5 + (seed as usize % 6);
        let (a, _, y) = normalized_problem(60_000 + seed, 50, 200, k);
        let gamma = 0.3 + 0.07 * (seed % 10) as f64;

        let mut s = IterateState::initial(&a, &y).unwrap();
        for _ in 0..k {
            let next = match domp_step(&s, &a, &y, k, gamma) {
                Ok(n) => n,
                Err(_) => break,
            };
            assert!(next.selected.is_disjoint(&s.support));
            let grown = next.support.len() - s.support.len();
            assert!(grown >= 1 && grown <= k);
            assert!(next.residual_norm <= s.residual_norm + 1e-10);
            assert!(optimality_gap(&a, &y, &next, &next.support) <= 1e-7);
            s = next;
        }

        for reset in [false, true] {
            let mut s = IterateState::initial(&a, &y).unwrap();
            let mut thresholded_before = false;
            for _ in 0..k {
                let next = match edomp_step(&s, &a, &y, k, gamma, reset) {
                    Ok(n) => n,
                    Err(_) => break,
                };
                if reset || !thresholded_before {
                    assert!(next.selected.is_disjoint(&s.support));
                }
                assert!(next.x.iter().filter(|v| **v != 0.0).count() <= k);
                assert!(next.projection_support.is_subset(&next.support));
                assert!(optimality_gap(&a, &y, &next, &next.projection_support) <= 1e-7);
                thresholded_before |= next.thresholded;
                s = next;
            }
        }
    }
}

#[test]
fn domp_with_gamma_one_follows_omp() {
    for seed in 0..20 {
        let (a, _, y) = normalized_problem(70_000 + seed, 40, 100, 6);
        let mut o = IterateState::initial(&a, &y).unwrap();
        let mut d = o.clone();
        for _ in 0..6 {
            let mut mags: Vec<f64> = o.gradient.iter().map(|v| v.abs()).collect();
            mags.sort_by(f64::total_cmp);
            if mags.windows(2).any(|w| w[0] == w[1] && w[0] != 0.0) {
                break;
            }
            o = omp_step(&o, &a, &y).unwrap();
            d = domp_step(&d, &a, &y, 6, 1.0).unwrap();
            assert_eq!(o.support, d.support);
        }
    }
}
