//! Vector-summarization coreset constructions.

mod deterministic;
mod fast;
mod partition;
mod prob;

pub use deterministic::{coreset, coreset_from_rows, coreset_of_size, Coreset, CoresetParams, Mode, AUTO_CROSSOVER, LIFTED_ERROR_DIVISOR};
pub use fast::{fast_coreset, FastCoreset};
pub use partition::{partition, PartitionPlan};
pub use prob::{group_count, group_size, prob_coreset, ProbCoreset, ProbParams};

#[allow(unused_imports)]
pub(crate) use deterministic::degenerate_representative;
