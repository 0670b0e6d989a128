use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

/// Rows of a libsvm file with labels mapped to ±1.
#[derive(Debug, Clone, PartialEq)]
pub struct LibsvmData {
    pub matrix: SparseMatrix,
    pub labels: Vec<f64>,
}

/// Reads `<label> <idx>:<val> ...` lines with 1-based feature indices.
///
/// The column count is the largest index seen, or `n` when given (which must
/// then cover every index).
pub fn read_libsvm(path: impl AsRef<Path>, n: Option<usize>) -> Result<LibsvmData> {
    parse_libsvm(&fs::read_to_string(path)?, n)
}

pub fn parse_libsvm(text: &str, n: Option<usize>) -> Result<LibsvmData> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let err = |message: String| Error::Parse { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().unwrap_or_default();
        let label: f64 = label_tok
            .parse()
            .map_err(|_| err(format!("bad label {label_tok:?}")))?;
        let label = if label == 1.0 {
            1.0
        } else if label == -1.0 || label == 0.0 {
            -1.0
        } else {
            return Err(err(format!("label {label} is not one of -1, 0, +1")));
        };
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("expected <index>:<value>, found {tok:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| err(format!("bad feature index {idx:?}")))?;
            if idx == 0 {
                return Err(err("feature indices are 1-based".into()));
            }
            let val: f64 = val.parse().map_err(|_| err(format!("bad value {val:?}")))?;
            if !val.is_finite() {
                return Err(err(format!("non-finite value {val}")));
            }
            entries.push((idx - 1, val));
            max_index = max_index.max(idx);
        }
        entries.sort_by_key(|e| e.0);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(err(format!("duplicate feature index {}", w[0].0 + 1)));
        }
        rows.push(entries);
        labels.push(label);
    }
    let cols = match n {
        Some(n) if n < max_index => {
            return Err(Error::InvalidParameter(format!(
                "feature count {n} is smaller than the largest index {max_index}"
            )))
        }
        Some(n) => n,
        None => max_index,
    };
    Ok(LibsvmData {
        matrix: SparseMatrix::from_row_entries(cols, rows)?,
        labels,
    })
}

/// Renders rows in libsvm format; values use the shortest round-tripping decimal.
pub fn format_libsvm(matrix: &SparseMatrix, labels: &[f64]) -> Result<String> {
    crate::error::check_dim(matrix.offsets().len() - 1, labels.len())?;
    let mut out = String::new();
    for (i, label) in labels.iter().enumerate() {
        out.push_str(if *label > 0.0 { "+1" } else { "-1" });
        let (idx, val) = matrix.row(i);
        for (j, v) in idx.iter().zip(val) {
            let _ = write!(out, " {}:{}", j + 1, v);
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_libsvm(path: impl AsRef<Path>, matrix: &SparseMatrix, labels: &[f64]) -> Result<()> {
    fs::write(path, format_libsvm(matrix, labels)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_line() {
        let d = parse_libsvm("+1 1:0.5 3:2\n", None).unwrap();
        assert_eq!(d.labels, vec![1.0]);
        assert_eq!(d.matrix.row(0), (&[0usize, 2][..], &[0.5, 2.0][..]));
        assert_eq!(d.matrix.to_dense().data(), &[0.5, 0.0, 2.0]);
    }

    #[test]
    fn empty_file_is_empty() {
        let d = parse_libsvm("", None).unwrap();
        assert!(d.labels.is_empty());
        assert_eq!(d.matrix.nnz(), 0);
        assert_eq!(d.matrix.offsets(), &[0]);
    }

    #[test]
    fn featureless_row_and_zero_label() {
        let d = parse_libsvm("-1\n0 2:1\n", None).unwrap();
        assert_eq!(d.labels, vec![-1.0, -1.0]);
        assert_eq!(d.matrix.row(0).0.len(), 0);
        let d = parse_libsvm("-1\n", Some(4)).unwrap();
        assert_eq!(d.matrix.to_dense().data(), &[0.0; 4]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, line) in [
            ("+1 1:1\n+1 x:2\n", 2),
            ("+1 2:1 2:3\n", 1),
            ("\n\n+1 1\n", 3),
            ("3 1:1", 1),
        ] {
            match parse_libsvm(text, None) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(parse_libsvm("+1 5:1\n", Some(3)).is_err());
    }

    #[test]
    fn round_trip() {
        let text = "+1 1:0.1 4:-3.25e-7\n-1\n-1 2:12345.678901234567\n";
        let d = parse_libsvm(text, None).unwrap();
        let again = parse_libsvm(&format_libsvm(&d.matrix, &d.labels).unwrap(), None).unwrap();
        assert_eq!(d, again);
    }
}
