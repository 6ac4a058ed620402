use crate::error::{check_epsilon, CoresetError, Result};
use crate::frank_wolfe::{fw_solve, iterations_for, FwProblem, RowSource, EARLY_EXIT_FRACTION};
use crate::linalg::dist_sq;
use crate::weighted::{lift, normalize, unlift_weights, SparseWeights, WeightedSet, DEGENERATE_REL};

use super::fast::fast_coreset;

/// Error factor applied before solving on the lifted points.
pub const LIFTED_ERROR_DIVISOR: f64 = 16.0;

/// Auto mode picks the booster when `n·ε > AUTO_CROSSOVER · log₂(n)²`.
pub const AUTO_CROSSOVER: f64 = 64.0;

/// How the lifted unit-ball problem is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Plain Frank-Wolfe over all points.
    Slow,
    /// The recursive partition-and-compress booster.
    Fast,
    /// Choose between the two from `n` and `ε`.
    Auto,
}

impl Mode {
    pub fn resolve(self, n: usize, eps: f64) -> Mode {
        match self {
            Mode::Auto => {
                let log_n = (n.max(2) as f64).log2();
                if n as f64 * eps > AUTO_CROSSOVER * log_n * log_n {
                    Mode::Fast
                } else {
                    Mode::Slow
                }
            }
            m => m,
        }
    }
}

/// Accuracy target and solver choice for [`coreset`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoresetParams {
    pub epsilon: f64,
    pub mode: Mode,
}

impl CoresetParams {
    pub fn new(epsilon: f64, mode: Mode) -> Self {
        Self { epsilon, mode }
    }
}

/// A vector-summarization coreset over the original indices.
#[derive(Debug, Clone)]
pub struct Coreset {
    pub weights: SparseWeights,
    /// The solver that was actually used.
    pub mode: Mode,
    /// Squared residual reached on the lifted problem.
    pub lifted_residual_sq: f64,
    /// True when the input had no spread and a single point was returned.
    pub degenerate: bool,
}

enum LiftedSolver {
    FrankWolfe { iterations: usize, early_exit: Option<f64> },
    Booster { eps: f64 },
}

/// Weighted set → normalized → lifted → sparse solve → weights over `Q`.
///
/// For `Slow` the output has at most `128/ε` nonzeros and
/// `summarization_error ≤ ε`; for `Fast` the bound is `2ε`.
pub fn coreset(set: &WeightedSet, params: CoresetParams) -> Result<Coreset> {
    let eps = params.epsilon;
    check_epsilon("epsilon", eps)?;
    let mode = params.mode.resolve(set.len(), eps);
    run(set, mode, solver_for(mode, eps))
}

/// The same pipeline with a support budget instead of an error target, as
/// used when comparing constructions at equal coreset size.
pub fn coreset_of_size(set: &WeightedSet, size: usize, mode: Mode) -> Result<Coreset> {
    if size == 0 {
        return Err(CoresetError::InvalidParameter {
            name: "size",
            reason: "must be positive".into(),
        });
    }
    let mode = match mode {
        Mode::Auto => Mode::Slow,
        m => m,
    };
    let solver = match mode {
        Mode::Fast => LiftedSolver::Booster {
            eps: (8.0 / size as f64).min(0.99),
        },
        _ => LiftedSolver::FrankWolfe {
            iterations: size - 1,
            early_exit: None,
        },
    };
    run(set, mode, solver)
}

fn solver_for(mode: Mode, eps: f64) -> LiftedSolver {
    let inner = eps / LIFTED_ERROR_DIVISOR;
    match mode {
        Mode::Fast => LiftedSolver::Booster { eps: inner },
        _ => LiftedSolver::FrankWolfe {
            iterations: iterations_for(inner),
            early_exit: Some(EARLY_EXIT_FRACTION * inner),
        },
    }
}

fn solve_lifted<S: RowSource + ?Sized>(
    points: &S,
    weights: &[f64],
    solver: LiftedSolver,
) -> Result<(SparseWeights, f64)> {
    match solver {
        LiftedSolver::FrankWolfe {
            iterations,
            early_exit,
        } => {
            let mut problem = FwProblem::new(points, weights, iterations)?;
            if let Some(t) = early_exit {
                problem = problem.with_early_exit(t);
            }
            let sol = fw_solve(&problem);
            Ok((sol.weights, sol.residual_sq))
        }
        LiftedSolver::Booster { eps } => {
            let out = fast_coreset(points, weights, eps)?;
            Ok((out.weights, out.residual_sq))
        }
    }
}

/// [`coreset`] over rows that are generated on demand rather than stored.
///
/// Normalization and lifting are applied row by row, so memory stays
/// `O(n + dim)` beyond what `rows` itself holds.
pub fn coreset_from_rows<S: RowSource + ?Sized>(
    rows: &S,
    weights: &[f64],
    params: CoresetParams,
) -> Result<Coreset> {
    let eps = params.epsilon;
    check_epsilon("epsilon", eps)?;
    let (n, d) = (rows.len(), rows.dim());
    if n == 0 || d == 0 {
        return Err(CoresetError::InvalidInput("empty point set".into()));
    }
    if weights.len() != n {
        return Err(CoresetError::DimensionMismatch {
            expected: n,
            got: weights.len(),
        });
    }
    if let Some((index, &weight)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w > 0.0))
    {
        return Err(CoresetError::NonPositiveWeight { index, weight });
    }
    let mode = params.mode.resolve(n, eps);

    let total: f64 = weights.iter().sum();
    let mut mu = vec![0.0; d];
    let mut max_abs = 0.0f64;
    let mut buf = vec![0.0; d];
    for (i, &w) in weights.iter().enumerate() {
        rows.row_into(i, &mut buf);
        for (m, q) in mu.iter_mut().zip(&buf) {
            *m += w * q;
            max_abs = max_abs.max(q.abs());
        }
    }
    if !max_abs.is_finite() {
        return Err(CoresetError::InvalidInput("non-finite coordinate".into()));
    }
    mu.iter_mut().for_each(|m| *m /= total);
    let mut dev_sq = vec![0.0; n];
    let mut variance = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        rows.row_into(i, &mut buf);
        dev_sq[i] = dist_sq(&buf, &mu);
        variance += w / total * dev_sq[i];
    }
    let threshold = (max_abs * DEGENERATE_REL).powi(2);
    if variance <= threshold || variance == 0.0 {
        let mut best = 0;
        for (i, &e) in dev_sq.iter().enumerate() {
            if e < dev_sq[best] {
                best = i;
            }
        }
        return Ok(Coreset {
            weights: SparseWeights::single(best, total),
            mode,
            lifted_residual_sq: 0.0,
            degenerate: true,
        });
    }
    let sigma = variance.sqrt();
    let scale: Vec<f64> = dev_sq.iter().map(|e| e / variance + 1.0).collect();
    let lifted_w: Vec<f64> = weights
        .iter()
        .zip(&scale)
        .map(|(w, s)| w / total * s / 2.0)
        .collect();
    let lifted = LiftedRows {
        rows,
        mu: &mu,
        sigma,
        scale: &scale,
    };
    let (u_lifted, lifted_residual_sq) = solve_lifted(&lifted, &lifted_w, solver_for(mode, eps))?;
    Ok(Coreset {
        weights: SparseWeights::from_pairs(
            u_lifted.iter().map(|(i, u)| (i, total * 2.0 * u / scale[i])),
        ),
        mode,
        lifted_residual_sq,
        degenerate: false,
    })
}

/// Rows `((q − μ)/σ | 1)/(‖(q − μ)/σ‖² + 1)` computed on access.
struct LiftedRows<'a, S: RowSource + ?Sized> {
    rows: &'a S,
    mu: &'a [f64],
    sigma: f64,
    scale: &'a [f64],
}

impl<S: RowSource + ?Sized> RowSource for LiftedRows<'_, S> {
    fn len(&self) -> usize {
        self.rows.len()
    }

    fn dim(&self) -> usize {
        self.rows.dim() + 1
    }

    fn row_into(&self, i: usize, out: &mut [f64]) {
        let d = self.rows.dim();
        self.rows.row_into(i, &mut out[..d]);
        let s = self.scale[i];
        for (x, m) in out[..d].iter_mut().zip(self.mu) {
            *x = (*x - m) / self.sigma / s;
        }
        out[d] = 1.0 / s;
    }

    fn row_norms_sq(&self) -> Vec<f64> {
        // ‖(p|1)‖²/(‖p‖²+1)² = 1/(‖p‖²+1).
        self.scale.iter().map(|s| 1.0 / s).collect()
    }
}

fn run(set: &WeightedSet, mode: Mode, solver: LiftedSolver) -> Result<Coreset> {
    let (normalized, transform) = match normalize(set) {
        Ok(v) => v,
        Err(CoresetError::DegenerateVariance { .. }) => {
            return Ok(Coreset {
                weights: degenerate_representative(set),
                mode,
                lifted_residual_sq: 0.0,
                degenerate: true,
            })
        }
        Err(e) => return Err(e),
    };
    let lifted = lift(&normalized);
    let (u_lifted, lifted_residual_sq) = solve_lifted(&lifted.points, &lifted.weights, solver)?;
    Ok(Coreset {
        weights: unlift_weights(&u_lifted, &normalized, transform.total_weight),
        mode,
        lifted_residual_sq,
        degenerate: false,
    })
}

/// The point nearest the weighted mean, carrying all of `‖m‖₁`.
pub(crate) fn degenerate_representative(set: &WeightedSet) -> SparseWeights {
    let mu = set.weighted_mean();
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for i in 0..set.len() {
        let d = dist_sq(set.point(i), &mu);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    SparseWeights::single(best, set.total_weight())
}
