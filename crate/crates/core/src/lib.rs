//! Average-query coresets for vector summarization.
//!
//! A vector-summarization `ε`-coreset of a weighted set `(Q, m)` is a sparse
//! reweighting `u` whose weighted mean is within `ε σ²` squared distance of
//! the original weighted mean, `σ²` being the weighted variance. This crate
//! builds such coresets deterministically with Frank-Wolfe (plain or
//! recursively boosted) or by median-of-means sampling, and uses them for
//! 1-mean, kernel density and k-SVD/PCA coresets, merge-and-reduce streaming,
//! and comparisons against sampling baselines.

pub mod apps;
pub mod baselines;
pub mod coresets;
pub mod error;
pub mod frank_wolfe;
pub mod linalg;
pub mod streaming;
pub mod weighted;

pub use coresets::{coreset, coreset_of_size, fast_coreset, prob_coreset, Coreset, CoresetParams, Mode, ProbParams};
pub use error::{CoresetError, Result};
pub use linalg::{svd, DenseMatrix, SvdFactors};
pub use weighted::{summarization_error, SparseWeights, WeightedSet};
