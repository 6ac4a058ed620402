#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use vecsum::{DenseMatrix, WeightedSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, d, |_, _| gaussian(rng))
}

/// Uniform direction with radius uniform in [0, 1].
pub fn ball_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DenseMatrix {
    let mut m = gaussian_matrix(rng, n, d);
    for i in 0..n {
        let r: f64 = rng.random();
        let row = m.row_mut(i);
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        row.iter_mut().for_each(|x| *x *= r / norm);
    }
    m
}

/// A random point of the simplex (normalized exponentials).
pub fn simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|x| x / s).collect()
}

pub fn lognormal_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| gaussian(rng).exp()).collect()
}

pub fn weighted_gaussian_set(rng: &mut ChaCha8Rng, n: usize, d: usize) -> WeightedSet {
    let pts = gaussian_matrix(rng, n, d);
    let w = lognormal_weights(rng, n);
    WeightedSet::new(pts, w).unwrap()
}
