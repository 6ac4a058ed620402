use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_epsilon, CoresetError, Result};
use crate::linalg::{dist_sq, DenseMatrix};
use crate::weighted::SparseWeights;

/// Parameters of the sampling construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbParams {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
}

/// Output of [`prob_coreset`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbCoreset {
    /// Sampled indices of the chosen group, possibly with repeats.
    pub sample: Vec<usize>,
    /// Number of groups drawn, `⌊3.5 ln(1/δ)⌋ + 1`.
    pub groups: usize,
    /// True when the requested sample exceeded `10·n` and the whole input
    /// was returned instead.
    pub full_input: bool,
}

impl ProbCoreset {
    /// Equal weights summing to `n` over the sample, duplicates merged.
    pub fn weights(&self, n: usize) -> SparseWeights {
        let per = n as f64 / self.sample.len() as f64;
        SparseWeights::from_pairs(self.sample.iter().map(|&i| (i, per)))
    }
}

/// `⌊3.5 ln(1/δ)⌋ + 1`.
pub fn group_count(delta: f64) -> usize {
    (3.5 * (1.0 / delta).ln()).floor() as usize + 1
}

/// `⌈4/ε⌉`.
pub fn group_size(eps: f64) -> usize {
    (4.0 / eps).ceil() as usize
}

/// Median-of-means sampling: draw `k` groups of `⌈4/ε⌉` uniform indices with
/// replacement and return the group whose mean has the smallest total
/// (unsquared) distance to the other group means.
pub fn prob_coreset(points: &DenseMatrix, params: ProbParams) -> Result<ProbCoreset> {
    check_epsilon("epsilon", params.epsilon)?;
    if !(params.delta > 0.0 && params.delta <= 0.9) {
        return Err(CoresetError::InvalidParameter {
            name: "delta",
            reason: format!("must lie in (0, 0.9], got {}", params.delta),
        });
    }
    let n = points.rows();
    let k = group_count(params.delta);
    let g = group_size(params.epsilon);
    if k * g > 10 * n {
        return Ok(ProbCoreset {
            sample: (0..n).collect(),
            groups: k,
            full_input: true,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let draws: Vec<usize> = (0..k * g).map(|_| rng.random_range(0..n)).collect();

    let d = points.cols();
    let means: Vec<Vec<f64>> = draws
        .chunks_exact(g)
        .map(|group| {
            let mut m = vec![0.0; d];
            for &i in group {
                m.iter_mut().zip(points.row(i)).for_each(|(a, x)| *a += x);
            }
            m.iter_mut().for_each(|a| *a /= g as f64);
            m
        })
        .collect();

    let mut best = 0;
    let mut best_cost = f64::INFINITY;
    for (j, mj) in means.iter().enumerate() {
        let cost: f64 = means.iter().map(|mi| dist_sq(mi, mj).sqrt()).sum();
        if cost < best_cost {
            best_cost = cost;
            best = j;
        }
    }
    Ok(ProbCoreset {
        sample: draws[best * g..(best + 1) * g].to_vec(),
        groups: k,
        full_input: false,
    })
}
