//! Line-oriented text model format.
//!
//! ```text
//! lupisvm-model v1
//! method svm2plus
//! kernel rbf:0.5
//! dim 5
//! classes 2
//! class -1
//! bias 0.25
//! nsv 2
//! 0.4 1:0.5 3:-1
//! -0.4 2:1
//! class 1
//! ...
//! ```
//!
//! Each support-vector line is the coefficient `α_i y_i` followed by the
//! support vector in sparse `idx:val` form (1-based). Numbers use
//! shortest round-trip decimals, so save → load → save is byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use lupi_svm::data::{parse_privileged, SparseRow};
use lupi_svm::kernels::KernelSpec;
use lupi_svm::trainers::{BinaryModel, Method, MulticlassModel};
use lupi_svm::Error;

pub const HEADER: &str = "lupisvm-model v1";

pub fn format_model(model: &MulticlassModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "method {}", model.method);
    let _ = writeln!(out, "kernel {}", model.kernel);
    let _ = writeln!(out, "dim {}", model.dim);
    let _ = writeln!(out, "classes {}", model.classes.len());
    for (label, binary) in model.classes.iter().zip(&model.binaries) {
        let _ = writeln!(out, "class {label}");
        let _ = writeln!(out, "bias {}", binary.bias);
        let _ = writeln!(out, "nsv {}", binary.coefficients.len());
        for (coeff, sv) in binary.coefficients.iter().zip(&binary.support_vectors) {
            let row = SparseRow::from_dense(sv).format();
            if row.is_empty() {
                let _ = writeln!(out, "{coeff}");
            } else {
                let _ = writeln!(out, "{coeff} {row}");
            }
        }
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn next_line(&mut self) -> Result<&'a str, Error> {
        match self.inner.next() {
            Some((k, text)) => {
                self.line = k + 1;
                Ok(text.trim_end_matches('\r'))
            }
            None => {
                self.line += 1;
                Err(self.err("unexpected end of model file"))
            }
        }
    }

    fn keyed(&mut self, key: &str) -> Result<&'a str, Error> {
        let text = self.next_line()?;
        match text.split_once(' ') {
            Some((k, v)) if k == key => Ok(v.trim()),
            _ => Err(self.err(format!("expected `{key} <value>`, found {text:?}"))),
        }
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, Error> {
        let value = self.keyed(key)?;
        value.parse().map_err(|_| self.err(format!("bad {key} value {value:?}")))
    }
}

pub fn parse_model(text: &str) -> Result<MulticlassModel, Error> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    if lines.next_line()? != HEADER {
        return Err(lines.err(format!("expected header {HEADER:?}")));
    }
    let method: Method = lines.keyed("method")?.parse().map_err(|e: Error| lines.err(e.to_string()))?;
    let kernel: KernelSpec = lines.keyed("kernel")?.parse().map_err(|e: Error| lines.err(e.to_string()))?;
    let dim: usize = lines.parsed("dim")?;
    let count: usize = lines.parsed("classes")?;
    if count < 2 {
        return Err(lines.err("a model needs at least two classes"));
    }
    let mut classes = Vec::with_capacity(count);
    let mut binaries = Vec::with_capacity(count);
    for _ in 0..count {
        let label: i64 = lines.parsed("class")?;
        if classes.last().is_some_and(|&prev| prev >= label) {
            return Err(lines.err("class labels must be strictly increasing"));
        }
        let bias: f64 = lines.parsed("bias")?;
        let nsv: usize = lines.parsed("nsv")?;
        let mut coefficients = Vec::with_capacity(nsv);
        let mut support_vectors = Vec::with_capacity(nsv);
        for _ in 0..nsv {
            let text = lines.next_line()?;
            let (coeff, rest) = text.split_once(' ').unwrap_or((text, ""));
            let coeff: f64 = coeff
                .parse()
                .map_err(|_| lines.err(format!("bad coefficient {coeff:?}")))?;
            // A trailing newline keeps an empty remainder as one (all-zero) row.
            let row = parse_privileged(&format!("{rest}\n"), 1).map_err(|e| match e {
                Error::Parse { message, .. } => lines.err(message),
                Error::NonMonotonicIndices { .. } => lines.err("indices must be strictly increasing"),
                other => other,
            })?;
            let sv = row.rows[0].to_dense(dim).map_err(|_| lines.err("support vector exceeds dim"))?;
            coefficients.push(coeff);
            support_vectors.push(sv);
        }
        classes.push(label);
        binaries.push(BinaryModel {
            method,
            kernel,
            dim,
            coefficients,
            support_vectors,
            bias,
            diagnostics: None,
        });
    }
    if let Some((k, extra)) = lines.inner.find(|(_, l)| !l.trim().is_empty()) {
        return Err(Error::Parse {
            line: k + 1,
            message: format!("trailing content {extra:?}"),
        });
    }
    Ok(MulticlassModel {
        method,
        kernel,
        dim,
        classes,
        class_counts: Vec::new(),
        binaries,
    })
}

pub fn save_model(path: impl AsRef<Path>, model: &MulticlassModel) -> Result<(), Error> {
    let path = path.as_ref();
    fs::write(path, format_model(model)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<MulticlassModel, Error> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_model(&text)
}
