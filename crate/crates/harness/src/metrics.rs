//! Error metrics reported by experiments.

use vecsum::weighted::mean_gap_sq;
use vecsum::{svd, DenseMatrix, SparseWeights, WeightedSet};

use crate::error::{HarnessError, Result};

/// `‖μ − μ_u‖²`, the unnormalized mean error.
pub fn metric_summarization(full: &WeightedSet, u: &SparseWeights) -> Result<f64> {
    Ok(mean_gap_sq(full, u)?)
}

/// Top-`k` right singular vectors as columns of a `d × k` matrix.
fn top_subspace(a: &DenseMatrix, k: usize) -> Result<DenseMatrix> {
    let f = svd(a)?;
    let k = k.min(f.s.len());
    Ok(DenseMatrix::from_fn(a.cols(), k, |i, j| f.v.get(i, j)))
}

/// `‖A‖²_F − ‖A V‖²_F`: squared distance of the rows to `span(V)`.
fn projection_cost(a: &DenseMatrix, v: &DenseMatrix) -> Result<f64> {
    let total: f64 = a.as_slice().iter().map(|x| x * x).sum();
    let kept: f64 = a.matmul(v)?.as_slice().iter().map(|x| x * x).sum();
    Ok((total - kept).max(0.0))
}

/// `|(c* − c′)/c*|`, where `c*` is the cost of `A`'s optimal `k`-subspace on
/// `A` and `c′` the cost on `A` of the optimal subspace of `diag(√w) A`.
pub fn metric_svd(a: &DenseMatrix, k: usize, weights: &[f64]) -> Result<f64> {
    if k == 0 || k >= a.cols() {
        return Err(HarnessError::Config(format!(
            "k must lie in [1, {}), got {k}",
            a.cols()
        )));
    }
    if weights.len() != a.rows() {
        return Err(HarnessError::Config(format!(
            "{} weights for {} rows",
            weights.len(),
            a.rows()
        )));
    }
    let support: Vec<usize> = (0..a.rows()).filter(|&i| weights[i] > 0.0).collect();
    if support.is_empty() {
        return Err(HarnessError::Config("all weights are zero".into()));
    }
    let weighted = DenseMatrix::from_fn(support.len(), a.cols(), |r, j| {
        weights[support[r]].sqrt() * a.get(support[r], j)
    });
    let best = projection_cost(a, &top_subspace(a, k)?)?;
    let ours = projection_cost(a, &top_subspace(&weighted, k)?)?;
    let scale: f64 = a.as_slice().iter().map(|x| x * x).sum();
    let tiny = 1e-12 * scale;
    if best <= tiny {
        return if ours <= tiny {
            Ok(0.0)
        } else {
            Err(HarnessError::ExactRankCase { cost: ours })
        };
    }
    Ok(((best - ours) / best).abs())
}
