//! Row reweightings that preserve the squared distance of `A` to every
//! affine subspace of dimension `k`.
//!
//! Each row is embedded as `v_i ∈ R^d` from the SVD of `[A | r𝟙]`, and a
//! vector-summarization coreset of the outer products `v_i v_iᵀ` gives the
//! weights `u`. With `W = diag(√u)`,
//! `‖W(A − ℓ)X‖²_F ≈ ‖(A − ℓ)X‖²_F` for every offset `ℓ` and every `X` with
//! `d − k` orthonormal columns.

use crate::coresets::{coreset, coreset_from_rows, CoresetParams, Mode};
use crate::error::{CoresetError, Result};
use crate::frank_wolfe::RowSource;
use crate::linalg::{dot, norm_sq, svd, DenseMatrix};
use crate::weighted::{WeightedSet, DEGENERATE_REL};

/// Above this many bytes the outer products are generated on demand.
pub const MATERIALIZE_BUDGET_BYTES: usize = 2 << 30;

/// Output of [`dim_coreset`].
#[derive(Debug, Clone)]
pub struct DimCoresetResult {
    /// `u_i`; the reweighted matrix is `diag(√u) A`.
    pub weights: Vec<f64>,
    pub nnz: usize,
    /// Column constant used for the rows after scaling to `max‖a_i‖ = 1`.
    pub r: f64,
    /// `1/max‖a_i‖`, applied to `A` before the construction.
    pub row_scale: f64,
    /// True when the tail spectrum vanished and all rows were kept at weight 1.
    pub exact: bool,
    /// The rows `v_i`; empty when `exact`.
    pub embedding: DenseMatrix,
}

impl DimCoresetResult {
    /// `⌈128 (5k/ε)²⌉`.
    pub fn nnz_bound(k: usize, eps: f64) -> f64 {
        (128.0 * (5.0 * k as f64 / eps).powi(2)).ceil()
    }
}

/// Computes the subspace coreset of `a` for `k`-dimensional subspaces.
///
/// Requires `n ≥ d + 1`, `1 ≤ k ≤ d` and `ε ∈ (0, ½)`.
pub fn dim_coreset(a: &DenseMatrix, k: usize, eps: f64, mode: Mode) -> Result<DimCoresetResult> {
    let (n, d) = (a.rows(), a.cols());
    if n < d + 1 {
        return Err(CoresetError::InvalidInput(format!(
            "need at least d + 1 = {} rows, got {n}",
            d + 1
        )));
    }
    if k == 0 || k > d {
        return Err(CoresetError::InvalidParameter {
            name: "k",
            reason: format!("must lie in [1, {d}], got {k}"),
        });
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(CoresetError::InvalidParameter {
            name: "epsilon",
            reason: format!("must lie in (0, 0.5), got {eps}"),
        });
    }
    let exact = |r: f64, row_scale: f64| DimCoresetResult {
        weights: vec![1.0; n],
        nnz: n,
        r,
        row_scale,
        exact: true,
        embedding: DenseMatrix::zeros(1, 1),
    };

    let max_norm = a.row_iter().map(norm_sq).fold(0.0, f64::max).sqrt();
    if max_norm == 0.0 {
        return Ok(exact(1.0, 1.0));
    }
    let row_scale = 1.0 / max_norm;
    let r = 1.0 + 4.0 / eps.powi(4);
    let augmented = DenseMatrix::from_fn(n, d + 1, |i, j| if j < d { a.get(i, j) * row_scale } else { r });
    let f = svd(&augmented)?;

    let tail: f64 = f.s[k..d].iter().map(|s| s * s).sum::<f64>().sqrt();
    if tail <= DEGENERATE_REL * f.s[0] {
        return Ok(exact(r, row_scale));
    }
    let embedding = DenseMatrix::from_fn(n, d, |i, j| {
        if j < k {
            f.u.get(i, j)
        } else {
            f.u.get(i, j) * f.s[j] / tail
        }
    });

    let inner = (eps / (5.0 * k as f64)).powi(2);
    let params = CoresetParams::new(inner, mode);
    let outer = OuterProducts { rows: &embedding };
    let u = if n.saturating_mul(d * d).saturating_mul(8) <= MATERIALIZE_BUDGET_BYTES {
        let mut stacked = DenseMatrix::zeros(n, d * d);
        for i in 0..n {
            outer.row_into(i, stacked.row_mut(i));
        }
        coreset(&WeightedSet::uniform(stacked), params)?.weights
    } else {
        coreset_from_rows(&outer, &vec![1.0; n], params)?.weights
    };
    Ok(DimCoresetResult {
        nnz: u.nnz(),
        weights: u.to_dense(n),
        r,
        row_scale,
        exact: false,
        embedding,
    })
}

/// Row `i` is the row-major stacking of `v_i v_iᵀ`.
struct OuterProducts<'a> {
    rows: &'a DenseMatrix,
}

impl RowSource for OuterProducts<'_> {
    fn len(&self) -> usize {
        self.rows.rows()
    }

    fn dim(&self) -> usize {
        self.rows.cols() * self.rows.cols()
    }

    fn row_into(&self, i: usize, out: &mut [f64]) {
        let v = self.rows.row(i);
        for (chunk, a) in out.chunks_exact_mut(v.len()).zip(v) {
            chunk.iter_mut().zip(v).for_each(|(o, b)| *o = a * b);
        }
    }

    fn row_norms_sq(&self) -> Vec<f64> {
        self.rows.row_iter().map(|v| norm_sq(v).powi(2)).collect()
    }
}

/// `(‖Σ(1 − u_i) v_i v_iᵀ‖_F, √Σ‖v_i v_iᵀ‖²_F)` for an embedding and weights.
pub fn gram_certificate(embedding: &DenseMatrix, weights: &[f64]) -> (f64, f64) {
    let d = embedding.cols();
    let mut gap = vec![0.0; d * d];
    let mut scale = 0.0;
    for (v, u) in embedding.row_iter().zip(weights) {
        let c = 1.0 - u;
        for (chunk, a) in gap.chunks_exact_mut(d).zip(v) {
            chunk.iter_mut().zip(v).for_each(|(g, b)| *g += c * a * b);
        }
        scale += norm_sq(v).powi(2);
    }
    (norm_sq(&gap).sqrt(), scale.sqrt())
}

/// `Σ_i u_i ‖(a_i − ℓ) X‖²`, with `u ≡ 1` when `weights` is `None`.
///
/// `x` is `d × (d − k)` with orthonormal columns.
pub fn subspace_cost(
    a: &DenseMatrix,
    weights: Option<&[f64]>,
    ell: &[f64],
    x: &DenseMatrix,
) -> Result<f64> {
    let d = a.cols();
    if ell.len() != d {
        return Err(CoresetError::DimensionMismatch { expected: d, got: ell.len() });
    }
    if x.rows() != d {
        return Err(CoresetError::DimensionMismatch { expected: d, got: x.rows() });
    }
    if let Some(w) = weights {
        if w.len() != a.rows() {
            return Err(CoresetError::DimensionMismatch { expected: a.rows(), got: w.len() });
        }
    }
    let gram = x.transpose().matmul(x)?;
    let off = (0..gram.rows())
        .flat_map(|i| (0..gram.cols()).map(move |j| (i, j)))
        .map(|(i, j)| (gram.get(i, j) - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    if off > 1e-8 {
        return Err(CoresetError::InvalidParameter {
            name: "x",
            reason: format!("columns are not orthonormal (max deviation {off:.3e})"),
        });
    }
    let xt = x.transpose();
    let mut diff = vec![0.0; d];
    let mut total = 0.0;
    for i in 0..a.rows() {
        let w = weights.map_or(1.0, |w| w[i]);
        if w == 0.0 {
            continue;
        }
        diff.iter_mut().zip(a.row(i)).zip(ell).for_each(|((o, q), l)| *o = q - l);
        total += w * xt.row_iter().map(|c| dot(c, &diff).powi(2)).sum::<f64>();
    }
    Ok(total)
}
