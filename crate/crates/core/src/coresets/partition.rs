use std::ops::Range;

/// Contiguous, balanced split of `0..n` into `k` parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPlan {
    boundaries: Vec<usize>,
}

impl PartitionPlan {
    /// Number of parts.
    pub fn k(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// The `k + 1` split points, starting at 0 and ending at `n`.
    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    pub fn part(&self, j: usize) -> Range<usize> {
        self.boundaries[j]..self.boundaries[j + 1]
    }

    pub fn parts(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        self.boundaries.windows(2).map(|w| w[0]..w[1])
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts().map(|r| r.len()).collect()
    }
}

/// Splits `0..n` into `k` contiguous ranges whose sizes differ by at most one,
/// larger parts first. `k` is clamped to `1..=n`.
pub fn partition(n: usize, k: usize) -> PartitionPlan {
    assert!(n >= 1, "cannot partition an empty range");
    let k = k.clamp(1, n);
    let (base, extra) = (n / k, n % k);
    let mut boundaries = Vec::with_capacity(k + 1);
    let mut at = 0;
    boundaries.push(0);
    for j in 0..k {
        at += base + usize::from(j < extra);
        boundaries.push(at);
    }
    PartitionPlan { boundaries }
}
