//! Compressed sparse row matrices over complex numbers and a banded LU
//! factorization with partial pivoting.
//!
//! The factorization stores the matrix by its band envelope (LAPACK-style
//! band layout with extra superdiagonals for pivot fill). All the shipped
//! benchmark problems are tridiagonal or block-banded, so the envelope is
//! tight; a general matrix still factors correctly as long as its bandwidth
//! keeps the band storage affordable.

use num_complex::Complex64;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square complex sparse matrix in CSR form.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseMatrix {
    /// Builds from coordinate triplets; duplicate positions are summed and
    /// exact zeros dropped.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, Complex64)],
    ) -> Result<Self> {
        for &(i, j, _) in triplets {
            if i >= n_rows || j >= n_cols {
                return Err(Error::DimensionMismatch {
                    context: format!("entry ({i}, {j}) outside {n_rows}x{n_cols} matrix"),
                });
            }
        }
        let mut sorted: Vec<(usize, usize, Complex64)> = triplets.to_vec();
        sorted.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(sorted.len());
        for &(i, j, v) in &sorted {
            if let (Some(&last_j), Some(last_v)) = (col_idx.last(), values.last_mut()) {
                if row_ptr[i + 1] > 0 && last_j == j && col_idx.len() == row_ptr[i + 1] {
                    // Same position as the previous entry of this row.
                    *last_v += v;
                    continue;
                }
            }
            col_idx.push(j);
            values.push(v);
            row_ptr[i + 1] = col_idx.len();
        }
        // Rows without entries inherit the running offset.
        for i in 1..=n_rows {
            if row_ptr[i] < row_ptr[i - 1] {
                row_ptr[i] = row_ptr[i - 1];
            }
        }
        let mut m = SparseMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        };
        m.drop_zeros();
        Ok(m)
    }

    fn drop_zeros(&mut self) {
        let mut row_ptr = vec![0usize; self.n_rows + 1];
        let mut col_idx = Vec::with_capacity(self.col_idx.len());
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.n_rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.values[k] != ZERO {
                    col_idx.push(self.col_idx[k]);
                    values.push(self.values[k]);
                }
            }
            row_ptr[i + 1] = col_idx.len();
        }
        self.row_ptr = row_ptr;
        self.col_idx = col_idx;
        self.values = values;
    }

    pub fn identity(n: usize) -> Self {
        let triplets: Vec<(usize, usize, Complex64)> =
            (0..n).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect();
        SparseMatrix::from_triplets(n, n, &triplets).expect("identity triplets are valid")
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.col_idx[k] == j {
                return self.values[k];
            }
        }
        ZERO
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n_cols, "matvec dimension mismatch");
        let mut y = vec![ZERO; self.n_rows];
        for i in 0..self.n_rows {
            let mut acc = ZERO;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = acc;
        }
        y
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Lower and upper bandwidths of the nonzero pattern.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut kl = 0usize;
        let mut ku = 0usize;
        for i in 0..self.n_rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                if i > j {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        (kl, ku)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                d.set(i, self.col_idx[k], self.values[k]);
            }
        }
        d
    }
}

/// Forms `sum_i coeff_i * a_i` over matrices with identical dimensions.
pub fn sparse_linear_combination(terms: &[(Complex64, &SparseMatrix)]) -> Result<SparseMatrix> {
    assert!(!terms.is_empty(), "empty linear combination");
    let n_rows = terms[0].1.n_rows;
    let n_cols = terms[0].1.n_cols;
    let mut triplets = Vec::new();
    for &(coeff, a) in terms {
        if a.n_rows != n_rows || a.n_cols != n_cols {
            return Err(Error::DimensionMismatch {
                context: "linear combination of differently sized matrices".into(),
            });
        }
        if coeff == ZERO {
            continue;
        }
        for i in 0..n_rows {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                triplets.push((i, a.col_idx[k], coeff * a.values[k]));
            }
        }
    }
    SparseMatrix::from_triplets(n_rows, n_cols, &triplets)
}

/// Banded LU factorization with partial pivoting.
///
/// Row interchanges widen the upper band from `ku` to `kl + ku`, so the
/// working storage holds `2 kl + ku + 1` diagonals per column.
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku_work: usize,
    ldab: usize,
    ab: Vec<Complex64>,
    piv: Vec<usize>,
}

/// Relative pivot threshold below which the matrix is declared singular.
const BAND_PIVOT_REL: f64 = 1e-13;

/// Cap on band storage (entries); protects against pathological bandwidths.
const MAX_BAND_STORAGE: usize = 1 << 28;

impl BandedLu {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        let n = a.n_rows();
        if a.n_cols() != n {
            return Err(Error::DimensionMismatch {
                context: "banded LU needs a square matrix".into(),
            });
        }
        let (kl, ku) = a.bandwidths();
        let ku_work = (kl + ku).min(n.saturating_sub(1));
        let ldab = kl + ku_work + 1;
        if ldab.saturating_mul(n) > MAX_BAND_STORAGE {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "band storage {}x{} too large; matrix bandwidth ({kl}, {ku}) is not practical here",
                    ldab, n
                ),
            });
        }
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        let mut ab = vec![ZERO; ldab * n];
        // Entry (i, j) lives at ab[j * ldab + ku_work + i - j].
        for i in 0..n {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                let j = a.col_idx[k];
                ab[j * ldab + ku_work + i - j] = a.values[k];
            }
        }
        let idx = |i: usize, j: usize| -> usize { j * ldab + ku_work + i - j };
        let mut piv = vec![0usize; n];
        for j in 0..n {
            let i_max = (j + kl).min(n - 1);
            let mut p = j;
            let mut p_mag = ab[idx(j, j)].norm();
            for i in (j + 1)..=i_max {
                let mag = ab[idx(i, j)].norm();
                if mag > p_mag {
                    p = i;
                    p_mag = mag;
                }
            }
            if p_mag <= BAND_PIVOT_REL * scale {
                return Err(Error::SingularPivot { step: j });
            }
            piv[j] = p;
            let j_max = (j + ku_work).min(n - 1);
            if p != j {
                for col in j..=j_max {
                    ab.swap(idx(j, col), idx(p, col));
                }
            }
            let pivot = ab[idx(j, j)];
            for i in (j + 1)..=i_max {
                let l = ab[idx(i, j)] / pivot;
                ab[idx(i, j)] = l;
                if l == ZERO {
                    continue;
                }
                for col in (j + 1)..=j_max {
                    let u = ab[idx(j, col)];
                    if u != ZERO {
                        ab[idx(i, col)] -= l * u;
                    }
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            ku_work,
            ldab,
            ab,
            piv,
        })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(b.len(), self.n, "solve dimension mismatch");
        let idx = |i: usize, j: usize| -> usize { j * self.ldab + self.ku_work + i - j };
        let mut x = b.to_vec();
        for j in 0..self.n {
            x.swap(j, self.piv[j]);
            let xj = x[j];
            if xj == ZERO {
                continue;
            }
            let i_max = (j + self.kl).min(self.n - 1);
            for i in (j + 1)..=i_max {
                let l = self.ab[idx(i, j)];
                if l != ZERO {
                    x[i] -= l * xj;
                }
            }
        }
        for j in (0..self.n).rev() {
            let mut s = x[j];
            let c_max = (j + self.ku_work).min(self.n - 1);
            for col in (j + 1)..=c_max {
                let u = self.ab[idx(j, col)];
                if u != ZERO {
                    s -= u * x[col];
                }
            }
            x[j] = s / self.ab[idx(j, j)];
        }
        x
    }
}
