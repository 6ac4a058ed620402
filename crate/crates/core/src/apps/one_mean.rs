//! Coresets preserving the sum of squared distances to every center.

use crate::coresets::{coreset, CoresetParams, Mode};
use crate::error::{check_epsilon, CoresetError, Result};
use crate::linalg::{dist_sq, norm_sq};
use crate::weighted::{normalize, SparseWeights, WeightedSet};

/// A weighting `u` with
/// `|Σ(m_i − u_i)‖q_i − x‖²| ≤ ε Σ m_i‖q_i − x‖²` for every center `x`,
/// built as a vector-summarization `(ε/4)²`-coreset.
pub fn one_mean_coreset(set: &WeightedSet, eps: f64, mode: Mode) -> Result<SparseWeights> {
    check_epsilon("epsilon", eps)?;
    if set.len() < 2 {
        return Err(CoresetError::InvalidInput("1-mean coreset needs at least two points".into()));
    }
    let inner = (eps / 4.0) * (eps / 4.0);
    Ok(coreset(set, CoresetParams::new(inner, mode))?.weights)
}

/// `Σ_i u_i ‖q_i − x‖²`, with `u` defaulting to the set's own weights.
pub fn one_mean_cost(set: &WeightedSet, weights: Option<&SparseWeights>, x: &[f64]) -> f64 {
    match weights {
        None => set
            .weights()
            .iter()
            .zip(set.points().row_iter())
            .map(|(w, q)| w * dist_sq(q, x))
            .sum(),
        Some(u) => u.iter().map(|(i, w)| w * dist_sq(set.point(i), x)).sum(),
    }
}

/// The three quantities that bound the 1-mean error, computed in normalized
/// coordinates with `ũ = u/‖m‖₁`. Each at most `ε_in` implies relative cost
/// error at most `2ε_in` for every center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneMeanCertificates {
    /// `‖Σ ũ_i p_i‖`.
    pub mean_norm: f64,
    /// `|1 − Σ ũ_i|`.
    pub mass_gap: f64,
    /// `|1 − Σ ũ_i ‖p_i‖²|`.
    pub second_moment_gap: f64,
}

impl OneMeanCertificates {
    pub fn max(&self) -> f64 {
        self.mean_norm.max(self.mass_gap).max(self.second_moment_gap)
    }
}

/// Evaluates [`OneMeanCertificates`]; a set without spread yields zeros when
/// `u` carries the full weight.
pub fn one_mean_certificates(set: &WeightedSet, u: &SparseWeights) -> Result<OneMeanCertificates> {
    if let Some(max) = u.max_index() {
        if max >= set.len() {
            return Err(CoresetError::InvalidInput(format!(
                "weight index {max} out of range for {} points",
                set.len()
            )));
        }
    }
    let (normalized, transform) = match normalize(set) {
        Ok(v) => v,
        Err(CoresetError::DegenerateVariance { .. }) => {
            let mass_gap = (1.0 - u.total() / set.total_weight()).abs();
            return Ok(OneMeanCertificates {
                mean_norm: 0.0,
                mass_gap,
                second_moment_gap: 0.0,
            });
        }
        Err(e) => return Err(e),
    };
    let d = set.dim();
    let mut mean = vec![0.0; d];
    let mut mass = 0.0;
    let mut second = 0.0;
    for (i, w) in u.iter() {
        let w = w / transform.total_weight;
        let p = normalized.points.row(i);
        mean.iter_mut().zip(p).for_each(|(m, x)| *m += w * x);
        mass += w;
        second += w * norm_sq(p);
    }
    Ok(OneMeanCertificates {
        mean_norm: norm_sq(&mean).sqrt(),
        mass_gap: (1.0 - mass).abs(),
        second_moment_gap: (1.0 - second).abs(),
    })
}
