//! Randomized samplers used as comparison points.
//!
//! Every sampler draws `size` indices i.i.d. with replacement, gives each pick
//! the importance weight `m_i / (size · p_i)`, and merges repeated indices by
//! summing. The weighted sum `Σ u_i q_i` is then unbiased for `Σ m_i q_i`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CoresetError, Result};
use crate::linalg::{norm_sq, svd, DenseMatrix};
use crate::weighted::{SparseWeights, WeightedSet};

/// Sample size and seed for one draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSpec {
    pub size: usize,
    pub seed: u64,
}

impl SampleSpec {
    pub fn new(size: usize, seed: u64) -> Result<Self> {
        if size == 0 {
            return Err(CoresetError::InvalidParameter {
                name: "size",
                reason: "must be positive".into(),
            });
        }
        Ok(Self { size, seed })
    }
}

fn draw(probabilities: &[f64], masses: &[f64], spec: SampleSpec) -> SparseWeights {
    let dist = WeightedIndex::new(probabilities).expect("probabilities are finite, nonnegative, nonzero");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let size = spec.size as f64;
    SparseWeights::from_pairs((0..spec.size).map(|_| {
        let i = dist.sample(&mut rng);
        (i, masses[i] / (size * probabilities[i]))
    }))
}

/// Uniform indices; for unit weights each pick carries `n/size`.
pub fn uniform_sample(set: &WeightedSet, spec: SampleSpec) -> SparseWeights {
    let n = set.len();
    draw(&vec![1.0 / n as f64; n], set.weights(), spec)
}

/// `s(q) = 1/n + ‖q‖²/Σ‖q'‖²`, normalized to sum to 1. `None` if every
/// point is the origin.
pub fn sum_sensitivities(set: &WeightedSet) -> Option<Vec<f64>> {
    let norms: Vec<f64> = set.points().row_iter().map(norm_sq).collect();
    let total: f64 = norms.iter().sum();
    if total == 0.0 {
        return None;
    }
    let n = set.len() as f64;
    Some(norms.iter().map(|s| (1.0 / n + s / total) / 2.0).collect())
}

/// Importance sampling by [`sum_sensitivities`]; uniform when all points are
/// zero.
pub fn sensitivity_sample_sum(set: &WeightedSet, spec: SampleSpec) -> SparseWeights {
    match sum_sensitivities(set) {
        Some(p) => draw(&p, set.weights(), spec),
        None => uniform_sample(set, spec),
    }
}

/// Leverage scores of the best rank-`k` approximation of `a`, normalized to
/// sum to 1. Uses `rank(a)` directions when that is smaller than `k`; `None`
/// if `a` is zero.
pub fn svd_sensitivities(a: &DenseMatrix, k: usize) -> Result<Option<Vec<f64>>> {
    if k == 0 || k > a.rows() {
        return Err(CoresetError::InvalidParameter {
            name: "k",
            reason: format!("must lie in [1, {}], got {k}", a.rows()),
        });
    }
    let f = svd(a)?;
    let cutoff = f.s[0] * (a.rows().max(a.cols()) as f64) * f64::EPSILON;
    let rank = f.s.iter().take_while(|&&s| s > cutoff).count();
    let k = k.min(rank);
    if k == 0 {
        return Ok(None);
    }
    let lev: Vec<f64> = (0..a.rows())
        .map(|i| (0..k).map(|j| f.u.get(i, j).powi(2)).sum())
        .collect();
    let total: f64 = lev.iter().sum();
    Ok(Some(lev.iter().map(|l| l / total).collect()))
}

/// Importance sampling of rows by [`svd_sensitivities`], unit row weights.
pub fn sensitivity_sample_svd(a: &DenseMatrix, k: usize, spec: SampleSpec) -> Result<SparseWeights> {
    let ones = vec![1.0; a.rows()];
    Ok(match svd_sensitivities(a, k)? {
        Some(p) => draw(&p, &ones, spec),
        None => draw(&vec![1.0 / a.rows() as f64; a.rows()], &ones, spec),
    })
}
