//! Frank-Wolfe maximization of `f(x) = −‖Σ(w_i − x_i) p_i‖²` over the
//! probability simplex.
//!
//! The iterate starts at the best vertex and moves towards the vertex with
//! the largest gradient coordinate using an exact line search. After `k`
//! iterations it has at most `k + 1` nonzeros, which is what makes the
//! output a small coreset.

use crate::error::{CoresetError, Result};
use crate::linalg::{dot, norm_sq, DenseMatrix};
use crate::weighted::{SparseWeights, TAU_NORM};

/// Squared direction norm below which the line search returns zero.
pub const TAU_FW: f64 = 1e-14;

/// The maintained residual is recomputed from scratch this often.
pub const REFRESH_PERIOD: usize = 64;

/// Fraction of the target error at which iterations stop early.
pub const EARLY_EXIT_FRACTION: f64 = 1e-2;

/// Read access to the rows of a point matrix that may not be materialized.
pub trait RowSource {
    fn len(&self) -> usize;

    fn dim(&self) -> usize;

    fn row_into(&self, i: usize, out: &mut [f64]);

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `out[i] = row_i · v` for every row.
    fn dots(&self, v: &[f64], out: &mut [f64]) {
        let mut buf = vec![0.0; self.dim()];
        for (i, o) in out.iter_mut().enumerate() {
            self.row_into(i, &mut buf);
            *o = dot(&buf, v);
        }
    }

    /// `acc += alpha · row_i`.
    fn axpy_row(&self, i: usize, alpha: f64, acc: &mut [f64]) {
        let mut buf = vec![0.0; self.dim()];
        self.row_into(i, &mut buf);
        acc.iter_mut().zip(&buf).for_each(|(a, r)| *a += alpha * r);
    }

    /// `Σ_i w_i row_i`.
    fn combination(&self, weights: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; self.dim()];
        let mut buf = vec![0.0; self.dim()];
        for (i, &w) in weights.iter().enumerate() {
            if w != 0.0 {
                self.row_into(i, &mut buf);
                acc.iter_mut().zip(&buf).for_each(|(a, r)| *a += w * r);
            }
        }
        acc
    }

    fn row_norms_sq(&self) -> Vec<f64> {
        let mut buf = vec![0.0; self.dim()];
        (0..self.len())
            .map(|i| {
                self.row_into(i, &mut buf);
                norm_sq(&buf)
            })
            .collect()
    }
}

impl RowSource for DenseMatrix {
    fn len(&self) -> usize {
        self.rows()
    }

    fn dim(&self) -> usize {
        self.cols()
    }

    fn row_into(&self, i: usize, out: &mut [f64]) {
        out.copy_from_slice(self.row(i));
    }

    fn dots(&self, v: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(self.row_iter()) {
            *o = dot(row, v);
        }
    }

    fn axpy_row(&self, i: usize, alpha: f64, acc: &mut [f64]) {
        acc.iter_mut().zip(self.row(i)).for_each(|(a, r)| *a += alpha * r);
    }

    fn combination(&self, weights: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; self.cols()];
        for (&w, row) in weights.iter().zip(self.row_iter()) {
            if w != 0.0 {
                acc.iter_mut().zip(row).for_each(|(a, r)| *a += w * r);
            }
        }
        acc
    }

    fn row_norms_sq(&self) -> Vec<f64> {
        self.row_iter().map(norm_sq).collect()
    }
}

/// The rows of `source` listed in `indices`, in that order.
pub struct Subset<'a, S: RowSource + ?Sized> {
    pub source: &'a S,
    pub indices: &'a [usize],
}

impl<S: RowSource + ?Sized> RowSource for Subset<'_, S> {
    fn len(&self) -> usize {
        self.indices.len()
    }

    fn dim(&self) -> usize {
        self.source.dim()
    }

    fn row_into(&self, i: usize, out: &mut [f64]) {
        self.source.row_into(self.indices[i], out)
    }

    fn axpy_row(&self, i: usize, alpha: f64, acc: &mut [f64]) {
        self.source.axpy_row(self.indices[i], alpha, acc)
    }
}

/// A Frank-Wolfe instance: points in the unit ball, a target distribution
/// `w`, and an iteration budget `K`.
pub struct FwProblem<'a, S: RowSource + ?Sized> {
    points: &'a S,
    target: &'a [f64],
    iterations: usize,
    early_exit: Option<f64>,
    norms_sq: Vec<f64>,
}

impl<'a, S: RowSource + ?Sized> FwProblem<'a, S> {
    pub fn new(points: &'a S, target: &'a [f64], iterations: usize) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(CoresetError::InvalidInput("no points".into()));
        }
        if target.len() != n {
            return Err(CoresetError::DimensionMismatch {
                expected: n,
                got: target.len(),
            });
        }
        if target.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(CoresetError::InvalidInput("target weights must be nonnegative".into()));
        }
        let total: f64 = target.iter().sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(CoresetError::InvalidInput(format!(
                "target weights must sum to 1, got {total}"
            )));
        }
        let norms_sq = points.row_norms_sq();
        let limit = (1.0 + TAU_NORM) * (1.0 + TAU_NORM);
        if let Some((index, &nsq)) = norms_sq.iter().enumerate().find(|(_, v)| **v > limit) {
            return Err(CoresetError::UnitBallViolation {
                index,
                norm: nsq.sqrt(),
            });
        }
        Ok(Self {
            points,
            target,
            iterations,
            early_exit: None,
            norms_sq,
        })
    }

    /// Budget `K = ⌈8/ε⌉` with early exit once the squared residual drops
    /// below `ε/100`.
    pub fn for_epsilon(points: &'a S, target: &'a [f64], eps: f64) -> Result<Self> {
        crate::error::check_epsilon("epsilon", eps)?;
        Ok(Self::new(points, target, iterations_for(eps))?.with_early_exit(EARLY_EXIT_FRACTION * eps))
    }

    /// Stop as soon as the squared residual is at most `threshold`.
    pub fn with_early_exit(mut self, threshold: f64) -> Self {
        self.early_exit = Some(threshold);
        self
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn points(&self) -> &S {
        self.points
    }

    pub fn target(&self) -> &[f64] {
        self.target
    }

    /// `f(x) = −‖Σ(w_i − x_i) p_i‖²` for a dense `x`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        let diff: Vec<f64> = self.target.iter().zip(x).map(|(w, x)| w - x).collect();
        -norm_sq(&self.points.combination(&diff))
    }
}

/// `⌈8/ε⌉`.
pub fn iterations_for(eps: f64) -> usize {
    (8.0 / eps).ceil() as usize
}

/// Current iterate `x` on the simplex and the residual `r = Σ(w_i − x_i) p_i`.
#[derive(Debug, Clone)]
pub struct FwState {
    x: Vec<f64>,
    support: Vec<usize>,
    residual: Vec<f64>,
    target_mean: Vec<f64>,
    steps: usize,
}

impl FwState {
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    pub fn residual_sq(&self) -> f64 {
        norm_sq(&self.residual)
    }

    pub fn nnz(&self) -> usize {
        self.support.len()
    }

    /// Iterations taken so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn weights(&self) -> SparseWeights {
        SparseWeights::from_pairs(self.support.iter().map(|&i| (i, self.x[i])))
    }

    /// `Σ(w_i − x_i) p_i` evaluated from scratch.
    pub fn recompute_residual<S: RowSource + ?Sized>(&self, problem: &FwProblem<'_, S>) -> Vec<f64> {
        let mut r = self.target_mean.clone();
        for &i in &self.support {
            problem.points.axpy_row(i, -self.x[i], &mut r);
        }
        r
    }

    /// One Frank-Wolfe iteration. Returns the step size taken; zero means the
    /// iterate is optimal along every vertex direction and nothing changed.
    pub fn step<S: RowSource + ?Sized>(&mut self, problem: &FwProblem<'_, S>) -> f64 {
        let grad = fw_gradient(self, problem);
        let vertex = argmax(&grad);
        let alpha = fw_line_search(self, problem, vertex);
        if alpha <= 0.0 {
            return 0.0;
        }
        // h = p_vertex − A x = p_vertex − μ_w + r
        let mut h: Vec<f64> = self
            .residual
            .iter()
            .zip(&self.target_mean)
            .map(|(r, m)| r - m)
            .collect();
        problem.points.axpy_row(vertex, 1.0, &mut h);
        self.residual
            .iter_mut()
            .zip(&h)
            .for_each(|(r, hv)| *r -= alpha * hv);

        if alpha >= 1.0 {
            for &i in &self.support {
                self.x[i] = 0.0;
            }
            self.support.clear();
            self.support.push(vertex);
            self.x[vertex] = 1.0;
        } else {
            for &i in &self.support {
                self.x[i] *= 1.0 - alpha;
            }
            if self.x[vertex] == 0.0 {
                self.support.push(vertex);
            }
            self.x[vertex] += alpha;
        }
        self.steps += 1;
        if self.steps % REFRESH_PERIOD == 0 {
            self.residual = self.recompute_residual(problem);
        }
        alpha
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Starts at the vertex `e_i` maximizing `f(e_i) = −‖μ_w − p_i‖²`.
pub fn fw_init<S: RowSource + ?Sized>(problem: &FwProblem<'_, S>) -> FwState {
    let n = problem.points.len();
    let target_mean = problem.points.combination(problem.target);
    let mut proj = vec![0.0; n];
    problem.points.dots(&target_mean, &mut proj);
    // ‖μ − p_i‖² − ‖μ‖² = ‖p_i‖² − 2 p_i·μ
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for i in 0..n {
        let v = problem.norms_sq[i] - 2.0 * proj[i];
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    let mut x = vec![0.0; n];
    x[best] = 1.0;
    let mut residual = target_mean.clone();
    problem.points.axpy_row(best, -1.0, &mut residual);
    FwState {
        x,
        support: vec![best],
        residual,
        target_mean,
        steps: 0,
    }
}

/// `∇f(x)_j = 2 p_jᵀ r`.
pub fn fw_gradient<S: RowSource + ?Sized>(state: &FwState, problem: &FwProblem<'_, S>) -> Vec<f64> {
    let mut g = vec![0.0; problem.points.len()];
    problem.points.dots(&state.residual, &mut g);
    g.iter_mut().for_each(|v| *v *= 2.0);
    g
}

/// Exact maximizer of `f(x + α(e_v − x))` over `α ∈ [0, 1]`.
///
/// Along the segment `f = −‖r − α h‖²` with `h = p_v − A x`, so the
/// unconstrained optimum is `rᵀh / ‖h‖²`.
pub fn fw_line_search<S: RowSource + ?Sized>(
    state: &FwState,
    problem: &FwProblem<'_, S>,
    vertex: usize,
) -> f64 {
    let mut h: Vec<f64> = state
        .residual
        .iter()
        .zip(&state.target_mean)
        .map(|(r, m)| r - m)
        .collect();
    problem.points.axpy_row(vertex, 1.0, &mut h);
    let hh = norm_sq(&h);
    if hh <= TAU_FW {
        return 0.0;
    }
    (dot(&state.residual, &h) / hh).clamp(0.0, 1.0)
}

/// Output of [`fw_solve`].
#[derive(Debug, Clone)]
pub struct FwSolution {
    /// A distribution over point indices.
    pub weights: SparseWeights,
    /// `‖Σ(w_i − x_i) p_i‖²` at the returned iterate.
    pub residual_sq: f64,
    pub iterations: usize,
}

/// Runs up to `K` iterations, stopping early at the optional threshold or
/// when no vertex direction improves `f`.
pub fn fw_solve<S: RowSource + ?Sized>(problem: &FwProblem<'_, S>) -> FwSolution {
    let mut state = fw_init(problem);
    while state.steps < problem.iterations {
        if let Some(t) = problem.early_exit {
            if state.residual_sq() <= t {
                break;
            }
        }
        if state.step(problem) == 0.0 {
            break;
        }
    }
    let residual = state.recompute_residual(problem);
    FwSolution {
        weights: state.weights(),
        residual_sq: norm_sq(&residual),
        iterations: state.steps,
    }
}
