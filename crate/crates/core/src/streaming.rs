//! Merge-and-reduce summaries over a stream of chunks.
//!
//! Level `j` holds at most one bucket, a coreset standing for `2^j` chunks.
//! Inserting a chunk reduces it into level 0 and carries upward like binary
//! addition, merging equal-level buckets and reducing the union again.

use crate::coresets::{coreset, CoresetParams, Mode};
use crate::error::{check_epsilon, CoresetError, Result};
use crate::linalg::DenseMatrix;
use crate::weighted::{SparseWeights, WeightedSet};

#[derive(Debug, Clone)]
struct Bucket {
    set: WeightedSet,
    /// Stream position of each row of `set`.
    origin: Vec<usize>,
}

/// A streaming summary with a fixed per-reduction error `ε_leaf`.
#[derive(Debug, Clone)]
pub struct StreamSummary {
    epsilon_leaf: f64,
    chunk_size: usize,
    mode: Mode,
    levels: Vec<Option<Bucket>>,
    dim: Option<usize>,
    points_seen: usize,
    chunks_seen: usize,
    peak_buckets: usize,
}

impl StreamSummary {
    pub fn new(epsilon_leaf: f64, chunk_size: usize) -> Result<Self> {
        check_epsilon("epsilon", epsilon_leaf)?;
        if chunk_size < 2 {
            return Err(CoresetError::InvalidParameter {
                name: "chunk_size",
                reason: format!("must be at least 2, got {chunk_size}"),
            });
        }
        Ok(Self {
            epsilon_leaf,
            chunk_size,
            mode: Mode::Slow,
            levels: Vec::new(),
            dim: None,
            points_seen: 0,
            chunks_seen: 0,
            peak_buckets: 0,
        })
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn epsilon_leaf(&self) -> f64 {
        self.epsilon_leaf
    }

    pub fn chunk_size(&self) -> usize {
        self.chunk_size
    }

    pub fn points_seen(&self) -> usize {
        self.points_seen
    }

    pub fn chunks_seen(&self) -> usize {
        self.chunks_seen
    }

    pub fn occupied_levels(&self) -> usize {
        self.levels.iter().filter(|b| b.is_some()).count()
    }

    /// Largest number of simultaneously occupied levels so far.
    pub fn peak_buckets(&self) -> usize {
        self.peak_buckets
    }

    /// Rows currently held across all buckets.
    pub fn retained_points(&self) -> usize {
        self.levels.iter().flatten().map(|b| b.set.len()).sum()
    }

    /// Error guaranteed by a single reduction: `ε_leaf`, or `2ε_leaf` for the
    /// booster.
    pub fn certified_error(&self) -> f64 {
        match self.mode {
            Mode::Fast => 2.0 * self.epsilon_leaf,
            _ => self.epsilon_leaf,
        }
    }

    /// Adds a chunk whose rows occupy the next stream positions.
    pub fn insert(&mut self, chunk: &WeightedSet) -> Result<()> {
        match self.dim {
            Some(d) if d != chunk.dim() => {
                return Err(CoresetError::DimensionMismatch {
                    expected: d,
                    got: chunk.dim(),
                })
            }
            _ => self.dim = Some(chunk.dim()),
        }
        let origin = (self.points_seen..self.points_seen + chunk.len()).collect();
        let mut carry = self.reduce(Bucket {
            set: chunk.clone(),
            origin,
        })?;
        self.points_seen += chunk.len();
        self.chunks_seen += 1;

        let mut level = 0;
        loop {
            if level == self.levels.len() {
                self.levels.push(None);
            }
            match self.levels[level].take() {
                None => {
                    self.levels[level] = Some(carry);
                    break;
                }
                Some(existing) => {
                    carry = self.reduce(merge(existing, carry))?;
                    level += 1;
                }
            }
        }
        self.peak_buckets = self.peak_buckets.max(self.occupied_levels());
        Ok(())
    }

    /// Splits `set` into chunks of `chunk_size` rows and inserts them in order.
    pub fn insert_all(&mut self, set: &WeightedSet) -> Result<()> {
        let idx: Vec<usize> = (0..set.len()).collect();
        for part in idx.chunks(self.chunk_size) {
            let chunk = WeightedSet::new(
                set.points().select_rows(part),
                part.iter().map(|&i| set.weights()[i]).collect(),
            )?;
            self.insert(&chunk)?;
        }
        Ok(())
    }

    /// Merges every bucket and reduces once more; weights refer to stream
    /// positions.
    pub fn finalize(&self) -> Result<SparseWeights> {
        let merged = self
            .levels
            .iter()
            .flatten()
            .cloned()
            .reduce(merge)
            .ok_or(CoresetError::EmptyStream)?;
        let out = self.reduce(merged)?;
        Ok(SparseWeights::from_pairs(
            out.origin.iter().copied().zip(out.set.weights().iter().copied()),
        ))
    }

    fn reduce(&self, bucket: Bucket) -> Result<Bucket> {
        let c = coreset(&bucket.set, CoresetParams::new(self.epsilon_leaf, self.mode))?;
        Ok(Bucket {
            set: bucket.set.restrict(&c.weights),
            origin: c.weights.indices().map(|i| bucket.origin[i]).collect(),
        })
    }
}

fn merge(a: Bucket, b: Bucket) -> Bucket {
    let d = a.set.dim();
    let mut data = Vec::with_capacity((a.set.len() + b.set.len()) * d);
    data.extend_from_slice(a.set.points().as_slice());
    data.extend_from_slice(b.set.points().as_slice());
    let rows = a.set.len() + b.set.len();
    let mut weights = a.set.weights().to_vec();
    weights.extend_from_slice(b.set.weights());
    let mut origin = a.origin;
    origin.extend(b.origin);
    Bucket {
        set: WeightedSet::new(
            DenseMatrix::new(rows, d, data).expect("rows of valid sets"),
            weights,
        )
        .expect("weights of valid sets"),
        origin,
    }
}
