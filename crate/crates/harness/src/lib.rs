//! Dataset ingestion, metrics and experiment orchestration for the `vecsum`
//! coreset library.

pub mod error;
pub mod experiment;
pub mod io;
pub mod metrics;
pub mod synthetic;

pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, Algorithm, DataSource, ExperimentConfig, ExperimentReport, Grid, Param};
pub use io::{format_weights, load_csv, parse_csv, parse_weights};
pub use metrics::{metric_summarization, metric_svd};
pub use synthetic::{SyntheticKind, SyntheticSpec};
