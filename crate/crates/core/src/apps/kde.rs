//! Kernel density coresets through an explicit feature map.
//!
//! For a kernel `k(x, y) = ⟨φ(x), φ(y)⟩` the density estimate at `y` is the
//! inner product of `φ(y)` with the weighted mean of `φ(Q)`. A reweighting that
//! keeps that mean within `ε σ̂` therefore moves every density value by at
//! most `ε σ̂ ‖φ(y)‖`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::coresets::{coreset, CoresetParams, Mode};
use crate::error::{check_epsilon, CoresetError, Result};
use crate::linalg::{dot, DenseMatrix};
use crate::weighted::{SparseWeights, WeightedSet};

/// A deterministic map from `R^d` into `R^D`.
pub trait FeatureMap {
    fn output_dim(&self, input_dim: usize) -> usize;

    /// Writes `φ(q)` into `out`, which has length `output_dim(q.len())`.
    fn map_into(&self, q: &[f64], out: &mut [f64]);

    fn map(&self, q: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.output_dim(q.len())];
        self.map_into(q, &mut out);
        out
    }

    /// `φ` applied to every row.
    fn map_points(&self, points: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(points.rows(), self.output_dim(points.cols()));
        for i in 0..points.rows() {
            self.map_into(points.row(i), out.row_mut(i));
        }
        out
    }
}

/// `φ(q) = q`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityMap;

impl FeatureMap for IdentityMap {
    fn output_dim(&self, input_dim: usize) -> usize {
        input_dim
    }

    fn map_into(&self, q: &[f64], out: &mut [f64]) {
        out.copy_from_slice(q);
    }

    fn map_points(&self, points: &DenseMatrix) -> DenseMatrix {
        points.clone()
    }
}

/// Random Fourier features for `exp(−‖x − y‖²/(2h²))`.
///
/// Frequencies `ω_j ~ N(0, I/h²)` are paired as
/// `√(2/D) (cos ω_j·q, sin ω_j·q)`, so every feature vector has unit norm.
#[derive(Debug, Clone)]
pub struct RandomFourierFeatures {
    frequencies: DenseMatrix,
}

impl RandomFourierFeatures {
    /// `features` is the output dimension `D`, even and at least 2.
    pub fn new(input_dim: usize, features: usize, bandwidth: f64, seed: u64) -> Result<Self> {
        if input_dim == 0 {
            return Err(CoresetError::InvalidParameter {
                name: "input_dim",
                reason: "must be positive".into(),
            });
        }
        if features < 2 || features % 2 != 0 {
            return Err(CoresetError::InvalidParameter {
                name: "features",
                reason: format!("must be even and at least 2, got {features}"),
            });
        }
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(CoresetError::InvalidParameter {
                name: "bandwidth",
                reason: format!("must be positive, got {bandwidth}"),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frequencies = DenseMatrix::from_fn(features / 2, input_dim, |_, _| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z / bandwidth
        });
        Ok(Self { frequencies })
    }

    pub fn input_dim(&self) -> usize {
        self.frequencies.cols()
    }
}

impl FeatureMap for RandomFourierFeatures {
    fn output_dim(&self, _input_dim: usize) -> usize {
        2 * self.frequencies.rows()
    }

    fn map_into(&self, q: &[f64], out: &mut [f64]) {
        let half = self.frequencies.rows();
        let c = (1.0 / half as f64).sqrt();
        for j in 0..half {
            let (s, co) = dot(self.frequencies.row(j), q).sin_cos();
            out[2 * j] = c * co;
            out[2 * j + 1] = c * s;
        }
    }
}

/// Vector-summarization `ε²`-coreset of `φ(Q)` with the original weights.
pub fn kde_coreset(
    set: &WeightedSet,
    map: &dyn FeatureMap,
    eps: f64,
    mode: Mode,
) -> Result<SparseWeights> {
    check_epsilon("epsilon", eps)?;
    let mapped = WeightedSet::new(map.map_points(set.points()), set.weights().to_vec())?;
    Ok(coreset(&mapped, CoresetParams::new(eps * eps, mode))?.weights)
}

/// `Σ u_i ⟨φ(q_i), φ(y)⟩ / Σ u_i`, with `u` defaulting to the set's weights.
pub fn kde_value(
    set: &WeightedSet,
    weights: Option<&SparseWeights>,
    map: &dyn FeatureMap,
    y: &[f64],
) -> f64 {
    let fy = map.map(y);
    let mut buf = vec![0.0; fy.len()];
    let mut acc = 0.0;
    let mut total = 0.0;
    let mut add = |i: usize, w: f64| {
        map.map_into(set.point(i), &mut buf);
        acc += w * dot(&buf, &fy);
        total += w;
    };
    match weights {
        None => set.weights().iter().enumerate().for_each(|(i, &w)| add(i, w)),
        Some(u) => u.iter().for_each(|(i, w)| add(i, w)),
    }
    acc / total
}
