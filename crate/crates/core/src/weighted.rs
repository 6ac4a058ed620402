//! Weighted point sets, the normalization reduction and the unit-ball lifting.
//!
//! Every construction in this crate follows the same pipeline: a general
//! weighted set `(Q, m)` is normalized to `(P, w)` with `Σw = 1`, `Σ w p = 0`
//! and `Σ w ‖p‖² = 1`; the normalized points are lifted into the unit ball;
//! a sparse reweighting is computed there and mapped back to weights over the
//! original indices.

use crate::error::{CoresetError, Result};
use crate::linalg::{dist_sq, norm_sq, DenseMatrix};

/// Relative tolerance for the normalization identities.
pub const TAU_NORM: f64 = 1e-9;

/// Relative scale below which a weighted standard deviation counts as zero.
pub const DEGENERATE_REL: f64 = 1e-12;

/// `n` points in `d` dimensions with strictly positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSet {
    points: DenseMatrix,
    weights: Vec<f64>,
}

impl WeightedSet {
    /// Rejects any weight that is not finite and strictly positive.
    pub fn new(points: DenseMatrix, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != points.rows() {
            return Err(CoresetError::DimensionMismatch {
                expected: points.rows(),
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
        Ok(Self { points, weights })
    }

    /// Drops rows whose weight is not strictly positive and returns the
    /// original indices of the rows that were kept.
    pub fn new_dropping_nonpositive(
        points: DenseMatrix,
        weights: Vec<f64>,
    ) -> Result<(Self, Vec<usize>)> {
        if weights.len() != points.rows() {
            return Err(CoresetError::DimensionMismatch {
                expected: points.rows(),
                got: weights.len(),
            });
        }
        if let Some(pos) = weights.iter().position(|w| !w.is_finite()) {
            return Err(CoresetError::NonPositiveWeight {
                index: pos,
                weight: weights[pos],
            });
        }
        let kept: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
        if kept.is_empty() {
            return Err(CoresetError::InvalidInput("every weight is non-positive".into()));
        }
        let set = Self {
            points: points.select_rows(&kept),
            weights: kept.iter().map(|&i| weights[i]).collect(),
        };
        Ok((set, kept))
    }

    /// Unit weight on every point.
    pub fn uniform(points: DenseMatrix) -> Self {
        let n = points.rows();
        Self {
            points,
            weights: vec![1.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    pub fn points(&self) -> &DenseMatrix {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.row(i)
    }

    /// `‖m‖₁`.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn weighted_mean(&self) -> Vec<f64> {
        weighted_mean_of(&self.points, self.weights.iter().copied().enumerate())
    }

    /// `Σ (m_i/‖m‖₁) ‖q_i − μ‖²`.
    pub fn weighted_variance(&self) -> f64 {
        let mu = self.weighted_mean();
        let total = self.total_weight();
        self.weights
            .iter()
            .zip(self.points.row_iter())
            .map(|(w, q)| w / total * dist_sq(q, &mu))
            .sum()
    }

    /// Variance threshold under which the set is treated as a single point:
    /// `(1e-12 · max|q_ij|)²`.
    pub fn degeneracy_threshold(&self) -> f64 {
        let m = self.points.max_abs() * DEGENERATE_REL;
        m * m
    }

    /// The sub-set carried by `u`, with `u`'s weights.
    pub fn restrict(&self, u: &SparseWeights) -> WeightedSet {
        let idx: Vec<usize> = u.indices().collect();
        WeightedSet {
            points: self.points.select_rows(&idx),
            weights: u.iter().map(|(_, w)| w).collect(),
        }
    }
}

fn weighted_mean_of(points: &DenseMatrix, weights: impl Iterator<Item = (usize, f64)>) -> Vec<f64> {
    let mut acc = vec![0.0; points.cols()];
    let mut total = 0.0;
    for (i, w) in weights {
        total += w;
        for (a, q) in acc.iter_mut().zip(points.row(i)) {
            *a += w * q;
        }
    }
    acc.iter_mut().for_each(|a| *a /= total);
    acc
}

/// A sparse nonnegative reweighting over point indices.
///
/// Entries are kept sorted by index with distinct indices and strictly
/// positive weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseWeights {
    entries: Vec<(usize, f64)>,
}

impl SparseWeights {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sorts by index, sums duplicate indices and drops non-positive totals.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut entries: Vec<(usize, f64)> = pairs.into_iter().collect();
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, w) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += w,
                _ => merged.push((i, w)),
            }
        }
        merged.retain(|e| e.1 > 0.0);
        Self { entries: merged }
    }

    pub fn from_dense(weights: &[f64]) -> Self {
        Self {
            entries: weights
                .iter()
                .copied()
                .enumerate()
                .filter(|e| e.1 > 0.0)
                .collect(),
        }
    }

    pub fn single(index: usize, weight: f64) -> Self {
        Self::from_pairs([(index, weight)])
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(i, w) in &self.entries {
            out[i] = w;
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `‖u‖₁`.
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .ok()
            .map(|p| self.entries[p].1)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_pairs(self.entries.iter().map(|&(i, w)| (i, w * factor)))
    }

    /// Rewrites every index through `map`.
    pub fn reindexed(&self, map: impl Fn(usize) -> usize) -> Self {
        Self::from_pairs(self.entries.iter().map(|&(i, w)| (map(i), w)))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }
}

/// The (μ, σ, ‖m‖₁) triple relating a weighted set to its normalized form.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationTransform {
    pub mu: Vec<f64>,
    pub sigma: f64,
    pub total_weight: f64,
}

impl NormalizationTransform {
    /// `(q − μ)/σ`.
    pub fn apply(&self, q: &[f64]) -> Vec<f64> {
        q.iter().zip(&self.mu).map(|(x, m)| (x - m) / self.sigma).collect()
    }

    /// Maps a coreset of the normalized set back to the original scale,
    /// `u' = ‖m‖₁ · u`.
    pub fn denormalize_weights(&self, u: &SparseWeights) -> SparseWeights {
        u.scaled(self.total_weight)
    }
}

/// A distribution over points with zero weighted mean and unit weighted
/// second moment.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedWeightedSet {
    pub points: DenseMatrix,
    pub weights: Vec<f64>,
}

impl NormalizedWeightedSet {
    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `‖p_i‖²` for every point.
    pub fn squared_norms(&self) -> Vec<f64> {
        self.points.row_iter().map(norm_sq).collect()
    }

    /// Deviations from the three defining identities:
    /// `(|Σw − 1|, ‖Σ w p‖, |Σ w‖p‖² − 1|)`.
    pub fn identity_residuals(&self) -> (f64, f64, f64) {
        let sum_w: f64 = self.weights.iter().sum();
        let mean = weighted_mean_of(&self.points, self.weights.iter().copied().enumerate());
        let second: f64 = self
            .weights
            .iter()
            .zip(self.points.row_iter())
            .map(|(w, p)| w * norm_sq(p))
            .sum();
        (
            (sum_w - 1.0).abs(),
            norm_sq(&mean).sqrt() * sum_w,
            (second - 1.0).abs(),
        )
    }
}

/// Normalized points pushed into the unit ball together with rescaled weights.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedSet {
    pub points: DenseMatrix,
    pub weights: Vec<f64>,
}

/// Maps `(Q, m)` to its normalized set `p_i = (q_i − μ)/σ`, `w = m/‖m‖₁`.
///
/// Fails with [`CoresetError::DegenerateVariance`] when the variance is below
/// [`WeightedSet::degeneracy_threshold`]; any single point carrying the whole
/// weight is then an exact coreset.
pub fn normalize(set: &WeightedSet) -> Result<(NormalizedWeightedSet, NormalizationTransform)> {
    let mu = set.weighted_mean();
    let variance = set.weighted_variance();
    if variance <= set.degeneracy_threshold() || variance == 0.0 {
        return Err(CoresetError::DegenerateVariance { variance });
    }
    let sigma = variance.sqrt();
    let total_weight = set.total_weight();
    let transform = NormalizationTransform {
        mu,
        sigma,
        total_weight,
    };
    let mut points = DenseMatrix::zeros(set.len(), set.dim());
    for i in 0..set.len() {
        for ((p, q), m) in points
            .row_mut(i)
            .iter_mut()
            .zip(set.point(i))
            .zip(&transform.mu)
        {
            *p = (q - m) / sigma;
        }
    }
    let weights = set.weights().iter().map(|w| w / total_weight).collect();
    Ok((NormalizedWeightedSet { points, weights }, transform))
}

/// `p'_i = (p_i | 1)/(‖p_i‖² + 1)`, `w'_i = w_i (‖p_i‖² + 1)/2`.
pub fn lift(normalized: &NormalizedWeightedSet) -> LiftedSet {
    let (n, d) = (normalized.points.rows(), normalized.points.cols());
    let mut points = DenseMatrix::zeros(n, d + 1);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let p = normalized.points.row(i);
        let scale = norm_sq(p) + 1.0;
        let row = points.row_mut(i);
        for (r, x) in row.iter_mut().zip(p) {
            *r = x / scale;
        }
        row[d] = 1.0 / scale;
        weights.push(normalized.weights[i] * scale / 2.0);
    }
    LiftedSet { points, weights }
}

/// `u_i = ‖m‖₁ · 2u'_i/(‖p_i‖² + 1)` on the support of `u_lifted`.
pub fn unlift_weights(
    u_lifted: &SparseWeights,
    normalized: &NormalizedWeightedSet,
    total_weight: f64,
) -> SparseWeights {
    SparseWeights::from_pairs(u_lifted.iter().map(|(i, u)| {
        let scale = norm_sq(normalized.points.row(i)) + 1.0;
        (i, total_weight * 2.0 * u / scale)
    }))
}

/// `‖μ_u − μ_m‖² / σ²`, where `μ_u` is the mean under `u/‖u‖₁`.
///
/// A value at most `ε` certifies `u` as a vector-summarization `ε`-coreset.
pub fn summarization_error(set: &WeightedSet, u: &SparseWeights) -> Result<f64> {
    let gap = mean_gap_sq(set, u)?;
    let variance = set.weighted_variance();
    let tau = set.degeneracy_threshold();
    if variance <= tau || variance == 0.0 {
        return if gap <= tau {
            Ok(0.0)
        } else {
            Err(CoresetError::DegenerateVariance { variance })
        };
    }
    Ok(gap / variance)
}

/// `‖μ_u − μ_m‖²` without the variance normalization.
pub fn mean_gap_sq(set: &WeightedSet, u: &SparseWeights) -> Result<f64> {
    if let Some(max) = u.max_index() {
        if max >= set.len() {
            return Err(CoresetError::InvalidInput(format!(
                "weight index {max} out of range for {} points",
                set.len()
            )));
        }
    }
    if !(u.total() > 0.0) {
        return Err(CoresetError::InvalidInput("coreset weights sum to zero".into()));
    }
    let mu = set.weighted_mean();
    let mu_u = weighted_mean_of(set.points(), u.iter());
    Ok(dist_sq(&mu, &mu_u))
}
