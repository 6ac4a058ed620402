use crate::error::{check_epsilon, CoresetError, Result};
use crate::frank_wolfe::{fw_solve, iterations_for, FwProblem, RowSource, Subset, EARLY_EXIT_FRACTION};
use crate::linalg::{dist_sq, DenseMatrix};
use crate::weighted::SparseWeights;

use super::partition::partition;

/// Output of [`fast_coreset`].
#[derive(Debug, Clone)]
pub struct FastCoreset {
    /// A distribution over the input indices.
    pub weights: SparseWeights,
    /// Number of partition-and-compress rounds before the final solve.
    pub depth: usize,
    /// `‖Σ w(p) p − Σ u(p) p‖²` measured against the full input.
    pub residual_sq: f64,
}

/// Recursive booster for points in the unit ball.
///
/// With `L = log₂ n` fixed by the original input size, each round splits the
/// current set into `k = ⌈2L/ε⌉` contiguous parts, replaces each part by its
/// weighted mean, keeps only the parts selected by a Frank-Wolfe coreset of
/// the means at error `ε/L`, and spreads each selected part's weight back over
/// its points. Once at most `k` points remain, a final Frank-Wolfe solve at
/// error `ε` produces the output. The round errors sum to at most `ε`, so the
/// total squared error is at most `2ε`.
pub fn fast_coreset<S: RowSource + ?Sized>(
    points: &S,
    weights: &[f64],
    eps: f64,
) -> Result<FastCoreset> {
    check_epsilon("epsilon", eps)?;
    // Validates the unit-ball and simplex preconditions once.
    FwProblem::new(points, weights, 0)?;
    let n = points.len();
    let d = points.dim();

    let log_n = (n as f64).log2().max(1.0);
    let parts = ((2.0 * log_n / eps).ceil() as usize).max(2);
    let level_eps = eps / log_n;

    let mut current: Vec<usize> = (0..n).filter(|&i| weights[i] > 0.0).collect();
    let mut current_w: Vec<f64> = current.iter().map(|&i| weights[i]).collect();
    let mut depth = 0;

    while current.len() > parts {
        let plan = partition(current.len(), parts);
        let mut means = DenseMatrix::zeros(plan.k(), d);
        let mut mass = vec![0.0; plan.k()];
        for (j, range) in plan.parts().enumerate() {
            for t in range {
                points.axpy_row(current[t], current_w[t], means.row_mut(j));
                mass[j] += current_w[t];
            }
            let m = mass[j];
            means.row_mut(j).iter_mut().for_each(|x| *x /= m);
        }
        let total: f64 = mass.iter().sum();
        let target: Vec<f64> = mass.iter().map(|m| m / total).collect();
        let problem = FwProblem::new(&means, &target, iterations_for(level_eps))?
            .with_early_exit(EARLY_EXIT_FRACTION * level_eps);
        let chosen = fw_solve(&problem).weights;

        let mut next = Vec::new();
        let mut next_w = Vec::new();
        for (j, u) in chosen.iter() {
            for t in plan.part(j) {
                next.push(current[t]);
                next_w.push(u * current_w[t] / mass[j]);
            }
        }
        if next.len() >= current.len() {
            // The means problem kept every part; compress directly instead.
            break;
        }
        current = next;
        current_w = next_w;
        depth += 1;
    }

    let total: f64 = current_w.iter().sum();
    current_w.iter_mut().for_each(|w| *w /= total);
    let subset = Subset {
        source: points,
        indices: &current,
    };
    // ⌊8/ε⌋ − 1 iterations keep the support at most 8/ε.
    let base_iterations = ((8.0 / eps).floor() as usize).saturating_sub(1).max(1);
    let problem = FwProblem::new(&subset, &current_w, base_iterations)?
        .with_early_exit(EARLY_EXIT_FRACTION * eps);
    let solution = fw_solve(&problem);
    let out = solution.weights.reindexed(|i| current[i]);

    let mut dense = vec![0.0; n];
    for (i, u) in out.iter() {
        dense[i] = u;
    }
    let residual_sq = dist_sq(&points.combination(weights), &points.combination(&dense));
    if !residual_sq.is_finite() {
        return Err(CoresetError::InvalidInput("non-finite residual".into()));
    }
    Ok(FastCoreset {
        weights: out,
        depth,
        residual_sq,
    })
}
