//! CSV ingestion and weight output.

use std::fmt::Write as _;
use std::path::Path;

use vecsum::{DenseMatrix, SparseWeights};

use crate::error::{HarnessError, Result};

/// Reads a numeric CSV file into a matrix, one row per non-blank line.
pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_csv(&text, has_header)
}

/// [`load_csv`] on in-memory text. Line and column numbers are 1-based.
pub fn parse_csv(text: &str, has_header: bool) -> Result<DenseMatrix> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    let mut skip_header = has_header;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if skip_header {
            skip_header = false;
            continue;
        }
        let mut count = 0;
        for (c, field) in line.split(',').enumerate() {
            let field = field.trim();
            let value: f64 = field.parse().map_err(|_| HarnessError::Parse {
                line: line_no,
                column: c + 1,
                message: format!("`{field}` is not a number"),
            })?;
            if !value.is_finite() {
                return Err(HarnessError::Parse {
                    line: line_no,
                    column: c + 1,
                    message: format!("`{field}` is not finite"),
                });
            }
            data.push(value);
            count += 1;
        }
        match cols {
            None => cols = Some(count),
            Some(expected) if expected != count => {
                return Err(HarnessError::RaggedRows {
                    line: line_no,
                    expected,
                    got: count,
                })
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| HarnessError::Config("input has no data rows".into()))?;
    Ok(DenseMatrix::new(rows, cols, data)?)
}

/// `index,weight` lines for the nonzeros, weights with 17 significant digits.
pub fn format_weights(u: &SparseWeights) -> String {
    let mut out = String::with_capacity(u.nnz() * 32);
    for (i, w) in u.iter() {
        writeln!(out, "{i},{w:.16e}").expect("writing to a String");
    }
    out
}

/// Inverse of [`format_weights`].
pub fn parse_weights(text: &str) -> Result<SparseWeights> {
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (Some(i), Some(w), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(HarnessError::Parse {
                line: idx + 1,
                column: 1,
                message: "expected `index,weight`".into(),
            });
        };
        let i: usize = i.trim().parse().map_err(|_| HarnessError::Parse {
            line: idx + 1,
            column: 1,
            message: format!("`{i}` is not an index"),
        })?;
        let w: f64 = w.trim().parse().map_err(|_| HarnessError::Parse {
            line: idx + 1,
            column: 2,
            message: format!("`{w}` is not a number"),
        })?;
        pairs.push((i, w));
    }
    Ok(SparseWeights::from_pairs(pairs))
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}
