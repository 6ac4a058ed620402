use thiserror::Error;
use vecsum::CoresetError;

/// Failures surfaced by the harness, grouped by process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("ragged rows: line {line} has {got} fields, expected {expected}")]
    RaggedRows {
        line: usize,
        expected: usize,
        got: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("numerical failure: {0}")]
    Numeric(#[from] CoresetError),

    #[error("input has rank at most k but the coreset subspace misses it (cost {cost:e})")]
    ExactRankCase { cost: f64 },
}

impl HarnessError {
    /// 2 for input and configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Numeric(_) | HarnessError::ExactRankCase { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
