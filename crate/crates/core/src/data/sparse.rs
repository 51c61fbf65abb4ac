use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// One sparse row with 0-based, strictly increasing indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseRow {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseRow {
    /// Keeps the nonzero entries of a dense row.
    pub fn from_dense(row: &[f64]) -> Self {
        let mut out = SparseRow::default();
        for (i, &v) in row.iter().enumerate() {
            if v != 0.0 {
                out.indices.push(i);
                out.values.push(v);
            }
        }
        out
    }

    /// One past the largest index (0 for an empty row).
    pub fn width(&self) -> usize {
        self.indices.last().map_or(0, |i| i + 1)
    }

    pub fn to_dense(&self, dim: usize) -> Result<Vec<f64>> {
        if self.width() > dim {
            return Err(Error::dim("sparse row (feature dimension)", dim, self.width()));
        }
        let mut row = vec![0.0; dim];
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            row[i] = v;
        }
        Ok(row)
    }

    /// `idx:val` pairs with 1-based indices, shortest round-trip decimals.
    pub fn format(&self) -> String {
        let mut s = String::new();
        for (k, (&i, &v)) in self.indices.iter().zip(&self.values).enumerate() {
            if k > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{}:{}", i + 1, v);
        }
        s
    }
}

/// Rows of sparse features sharing one dimension.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseMatrix {
    pub rows: Vec<SparseRow>,
    pub dim: usize,
}

impl SparseMatrix {
    /// Dimension inferred as the largest index in use.
    pub fn from_rows(rows: Vec<SparseRow>) -> Self {
        let dim = rows.iter().map(SparseRow::width).max().unwrap_or(0);
        SparseMatrix { rows, dim }
    }

    pub fn from_dense(x: &DenseMatrix) -> Self {
        let rows = (0..x.rows()).map(|i| SparseRow::from_dense(&x.row(i))).collect();
        SparseMatrix { rows, dim: x.cols() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Dense copy with `dim` columns; fails if a row uses a larger index.
    pub fn to_dense(&self, dim: usize) -> Result<DenseMatrix> {
        let mut data = Vec::with_capacity(self.rows.len() * dim);
        for row in &self.rows {
            data.extend(row.to_dense(dim)?);
        }
        DenseMatrix::from_row_major(self.rows.len(), dim, &data)
    }

    pub fn select(&self, indices: &[usize]) -> SparseMatrix {
        SparseMatrix {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            dim: self.dim,
        }
    }
}

fn parse_row<'a>(tokens: impl Iterator<Item = &'a str>, line: usize) -> Result<SparseRow> {
    let mut row = SparseRow::default();
    for token in tokens {
        let (idx, val) = token.split_once(':').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected index:value, found {token:?}"),
        })?;
        let idx: usize = idx.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad index {idx:?}"),
        })?;
        if idx == 0 {
            return Err(Error::Parse {
                line,
                message: "indices are 1-based".into(),
            });
        }
        let val: f64 = val.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad value {val:?}"),
        })?;
        if !val.is_finite() {
            return Err(Error::Parse {
                line,
                message: format!("non-finite value {val:?}"),
            });
        }
        if row.indices.last().is_some_and(|&last| idx - 1 <= last) {
            return Err(Error::NonMonotonicIndices { line });
        }
        row.indices.push(idx - 1);
        row.values.push(val);
    }
    Ok(row)
}

/// Parses `label idx:val …` lines. Blank lines are skipped.
pub fn parse_sparse(text: &str) -> Result<(SparseMatrix, Vec<i64>)> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        let mut tokens = line.split_whitespace();
        let Some(label) = tokens.next() else {
            continue;
        };
        let label: i64 = label.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad label {label:?}"),
        })?;
        rows.push(parse_row(tokens, line_no)?);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile);
    }
    Ok((SparseMatrix::from_rows(rows), labels))
}

/// Parses label-free `idx:val …` lines; line `i` is the privileged row of
/// example `i` and a blank line is an all-zero row.
pub fn parse_privileged(text: &str, n: usize) -> Result<SparseMatrix> {
    let rows = text
        .lines()
        .enumerate()
        .map(|(k, line)| parse_row(line.split_whitespace(), k + 1))
        .collect::<Result<Vec<_>>>()?;
    if rows.len() != n {
        return Err(Error::LineCountMismatch {
            expected: n,
            found: rows.len(),
        });
    }
    Ok(SparseMatrix::from_rows(rows))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn load_sparse(path: impl AsRef<Path>) -> Result<(SparseMatrix, Vec<i64>)> {
    parse_sparse(&read(path.as_ref())?)
}

pub fn load_privileged(path: impl AsRef<Path>, n: usize) -> Result<SparseMatrix> {
    parse_privileged(&read(path.as_ref())?, n)
}

/// Renders rows, prefixed by labels when given.
pub fn format_sparse(x: &SparseMatrix, labels: Option<&[i64]>) -> String {
    let mut out = String::new();
    for (i, row) in x.rows.iter().enumerate() {
        let body = row.format();
        match labels {
            Some(l) if body.is_empty() => {
                let _ = writeln!(out, "{}", l[i]);
            }
            Some(l) => {
                let _ = writeln!(out, "{} {}", l[i], body);
            }
            None => {
                let _ = writeln!(out, "{body}");
            }
        }
    }
    out
}

pub fn write_sparse(path: impl AsRef<Path>, x: &SparseMatrix, labels: Option<&[i64]>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_sparse(x, labels)).map_err(|e| Error::io(path, e))
}
