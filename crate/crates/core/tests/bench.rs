use domp::algorithms::Algorithm;
use domp::bench::*;

#[test]
fn generator_moments_match_standard_normal() {
    // 10^6 entries; 4-sigma bands for the sample mean and variance
    let spec = EnsembleSpec::new(1000, 1000, 1, 2024);
    let p = generate_problem(&spec, 0);
    let data = p.a.as_dmatrix();
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let var = data.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    assert!(mean.abs() < 4.0 / n.sqrt(), "mean {mean}");
    assert!((var - 1.0).abs() < 4.0 * (2.0 / n).sqrt(), "variance {var}");
}

#[test]
fn support_positions_are_uniform() {
    let (n, k, trials) = (20, 3, 4000);
    let spec = EnsembleSpec::new(5, n, k, 77);
    let mut counts = vec![0usize; n];
    for t in 0..trials {
        let p = generate_problem(&spec, t);
        for (i, v) in p.x.iter().enumerate() {
            if *v != 0.0 {
                counts[i] += 1;
            }
        }
    }
    let expected = (trials * k) as f64 / n as f64;
    let sd = (expected * (1.0 - k as f64 / n as f64)).sqrt();
    for c in counts {
        assert!((c as f64 - expected).abs() < 4.5 * sd, "{c} vs {expected}");
    }
}

#[test]
fn csv_bytes_do_not_depend_on_threads() {
    let grid = GammaSweep {
        m: 30,
        n: 90,
        ks: vec![5, 12],
        gammas: vec![0.25, 0.9],
        algorithms: vec![Algorithm::Domp, Algorithm::Edomp],
    };
    let one = gamma_sweep(&grid, &SweepSettings::new(11, 8).with_threads(Some(1))).unwrap();
    let four = gamma_sweep(&grid, &SweepSettings::new(11, 8).with_threads(Some(4))).unwrap();
    let text = csv_string(&one).unwrap();
    assert_eq!(text, csv_string(&four).unwrap());
    assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(text.lines().count(), 1 + 8);
    assert_eq!(sidecar(&one)["provenance"]["settings"]["seed"], 11);
}

#[test]
fn success_falls_with_sparsity() {
    let grid = SparsitySweep {
        m: 40,
        n: 120,
        ks: vec![2, 8, 14, 20, 26],
        gamma: 0.9,
        algorithms: vec![Algorithm::Omp, Algorithm::Domp],
    };
    let r = success_curves(&grid, &SweepSettings::new(4, 30)).unwrap();
    for alg in grid.algorithms {
        let rates: Vec<f64> = grid
            .ks
            .iter()
            .map(|&k| r.cell(alg, k, None, None).unwrap().success_rate())
            .collect();
        assert_eq!(rates[0], 1.0, "{alg}");
        // one step up is allowed for sampling noise
        let ups = rates.windows(2).filter(|w| w[1] > w[0] + 1e-12).count();
        assert!(ups <= 1, "{alg}: {rates:?}");
        assert!(rates[4] < 0.5, "{alg}: {rates:?}");
    }
}

#[test]
fn timing_csv_has_one_row_per_cell() {
    let grid = ScalingSweep {
        ms: vec![20],
        n_ratio: 5,
        k_fraction: 0.3,
        gamma: 0.9,
        algorithms: vec![Algorithm::Sp, Algorithm::Domp],
    };
    let r = scaling_benchmark(&grid, &SweepSettings::new(1, 3)).unwrap();
    let mut buf = Vec::new();
    write_timing_csv(&r, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text
        .starts_with("sweep,algorithm,m,n,k,gamma,budget,trials,mean_runtime_s,median_runtime_s"));
}
