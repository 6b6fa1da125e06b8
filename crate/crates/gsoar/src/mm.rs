//! Matrix Market coordinate-format reader.
//!
//! Supports `real`, `integer`, and `complex` fields with `general`,
//! `symmetric`, `hermitian`, or `skew-symmetric` symmetry. Entries use
//! 1-based indices per the format; symmetric variants store one triangle and
//! are mirrored on read.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Integer,
    Complex,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    SkewSymmetric,
}

/// Reads a Matrix Market file from disk.
pub fn read_matrix_market(path: &Path) -> Result<SparseMatrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::MatrixFile(format!("{}: {e}", path.display())))?;
    parse_matrix_market(&text)
}

/// Parses Matrix Market coordinate text.
pub fn parse_matrix_market(text: &str) -> Result<SparseMatrix> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MatrixFile("empty file".into()))?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::MatrixFile(format!("malformed header: {header}")));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::MatrixFile(format!(
            "unsupported layout {:?}; only coordinate format is supported",
            tokens[2]
        )));
    }
    let field = match tokens[3].as_str() {
        "real" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        other => {
            return Err(Error::MatrixFile(format!("unsupported field type {other:?}")));
        }
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => {
            return Err(Error::MatrixFile(format!("unsupported symmetry {other:?}")));
        }
    };

    let mut data_lines = lines.filter(|l| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let size_line = data_lines
        .next()
        .ok_or_else(|| Error::MatrixFile("missing size line".into()))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| Error::MatrixFile(format!("bad size line: {e}"))))
        .collect::<Result<_>>()?;
    if dims.len() != 3 {
        return Err(Error::MatrixFile(format!("bad size line: {size_line}")));
    }
    let (n_rows, n_cols, nnz) = (dims[0], dims[1], dims[2]);

    let parse_f64 = |t: &str| -> Result<f64> {
        t.parse::<f64>()
            .map_err(|e| Error::MatrixFile(format!("bad numeric value {t:?}: {e}")))
    };
    let mut triplets = Vec::with_capacity(nnz * 2);
    let mut seen = 0usize;
    for line in data_lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let want = match field {
            Field::Complex => 4,
            _ => 3,
        };
        if toks.len() != want {
            return Err(Error::MatrixFile(format!("bad entry line: {line}")));
        }
        let i: usize = toks[0]
            .parse()
            .map_err(|e| Error::MatrixFile(format!("bad row index: {e}")))?;
        let j: usize = toks[1]
            .parse()
            .map_err(|e| Error::MatrixFile(format!("bad column index: {e}")))?;
        if i < 1 || j < 1 || i > n_rows || j > n_cols {
            return Err(Error::MatrixFile(format!("index ({i}, {j}) out of range")));
        }
        let v = match field {
            Field::Complex => Complex64::new(parse_f64(toks[2])?, parse_f64(toks[3])?),
            _ => Complex64::new(parse_f64(toks[2])?, 0.0),
        };
        triplets.push((i - 1, j - 1, v));
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => triplets.push((j - 1, i - 1, v)),
                Symmetry::Hermitian => triplets.push((j - 1, i - 1, v.conj())),
                Symmetry::SkewSymmetric => triplets.push((j - 1, i - 1, -v)),
            }
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(Error::MatrixFile(format!(
            "entry count mismatch: header says {nnz}, file has {seen}"
        )));
    }
    SparseMatrix::from_triplets(n_rows, n_cols, &triplets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_general_real() {
        let text = "%%MatrixMarket matrix coordinate real general\n\
                    % a comment\n\
                    3 3 2\n\
                    1 1 2.5\n\
                    3 2 -1.0\n";
        let a = parse_matrix_market(text).unwrap();
        assert_eq!(a.n_rows(), 3);
        assert_eq!(a.get(0, 0), Complex64::new(2.5, 0.0));
        assert_eq!(a.get(2, 1), Complex64::new(-1.0, 0.0));
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn parses_complex_hermitian_with_mirroring() {
        let text = "%%MatrixMarket matrix coordinate complex hermitian\n\
                    2 2 2\n\
                    1 1 1.0 0.0\n\
                    2 1 3.0 4.0\n";
        let a = parse_matrix_market(text).unwrap();
        assert_eq!(a.get(1, 0), Complex64::new(3.0, 4.0));
        assert_eq!(a.get(0, 1), Complex64::new(3.0, -4.0));
    }

    #[test]
    fn rejects_bad_header_and_counts() {
        assert!(parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n").is_err());
        assert!(parse_matrix_market("nonsense\n").is_err());
        let short = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n";
        match parse_matrix_market(short) {
            Err(Error::MatrixFile(msg)) => assert!(msg.contains("count mismatch")),
            other => panic!("expected count mismatch, got {other:?}"),
        }
    }

    #[test]
    fn rejects_out_of_range_indices() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n";
        assert!(parse_matrix_market(text).is_err());
    }
}
