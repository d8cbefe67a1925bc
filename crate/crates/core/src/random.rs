//! Seeded random instances shared by the verification suites and the
//! benchmark harness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{Matrix, Vector};

/// Generator used for every random instance in the crate.
pub type InstanceRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes a master seed and a list of coordinates into a stream seed, so
/// each (seed, coordinates) pair owns an independent generator.
pub fn derive_seed(seed: u64, coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(splitmix64(seed), |acc, &c| splitmix64(acc ^ splitmix64(c)))
}

pub fn rng_for(seed: u64, coords: &[u64]) -> InstanceRng {
    InstanceRng::seed_from_u64(derive_seed(seed, coords))
}

pub fn standard_normal(rng: &mut InstanceRng) -> f64 {
    StandardNormal.sample(rng)
}

/// `m x n` matrix of iid standard normals times `scale`, filled row by row.
pub fn gaussian_matrix(rng: &mut InstanceRng, m: usize, n: usize, scale: f64) -> Matrix {
    let entries: Vec<f64> = (0..m * n).map(|_| scale * standard_normal(rng)).collect();
    Matrix::from_row_major(m, n, &entries).expect("positive dimensions and finite entries")
}

pub fn gaussian_vector(rng: &mut InstanceRng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| standard_normal(rng))
}

/// Vector with exactly `k` standard-normal nonzeros on a uniformly random support.
pub fn sparse_gaussian_vector(rng: &mut InstanceRng, n: usize, k: usize) -> Vector {
    let mut support = rand::seq::index::sample(rng, n, k.min(n)).into_vec();
    support.sort_unstable();
    let mut x = Vector::zeros(n);
    for i in support {
        let mut v = standard_normal(rng);
        // a zero draw would shrink the support
        while v == 0.0 {
            v = standard_normal(rng);
        }
        x[i] = v;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_depend_on_every_coordinate() {
        let a = derive_seed(1, &[2, 3]);
        assert_eq!(a, derive_seed(1, &[2, 3]));
        assert_ne!(a, derive_seed(1, &[3, 2]));
        assert_ne!(a, derive_seed(2, &[2, 3]));
        assert_ne!(a, derive_seed(1, &[2, 3, 0]));
    }

    #[test]
    fn sparse_vector_has_exact_support_size() {
        let mut rng = rng_for(5, &[]);
        for k in [0, 1, 7, 20] {
            let x = sparse_gaussian_vector(&mut rng, 20, k);
            assert_eq!(x.iter().filter(|v| **v != 0.0).count(), k);
        }
    }
}
