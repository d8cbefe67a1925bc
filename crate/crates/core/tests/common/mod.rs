#![allow(dead_code)]

use domp::linalg::{Matrix, Vector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize, scale: f64) -> Matrix {
    let e: Vec<f64> = (0..m * n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            scale * z
        })
        .collect();
    Matrix::from_row_major(m, n, &e).unwrap()
}

pub fn sparse_signal(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vector {
    let mut x = Vector::zeros(n);
    for i in rand::seq::index::sample(rng, n, k) {
        x[i] = StandardNormal.sample(rng);
    }
    x
}

/// `(A, x, y = A x)` with `A` scaled by `1/sqrt(m)`.
pub fn normalized_problem(seed: u64, m: usize, n: usize, k: usize) -> (Matrix, Vector, Vector) {
    let mut r = rng(seed);
    let a = gaussian_matrix(&mut r, m, n, 1.0 / (m as f64).sqrt());
    let x = sparse_signal(&mut r, n, k);
    let y = a.apply(&x);
    (a, x, y)
}
