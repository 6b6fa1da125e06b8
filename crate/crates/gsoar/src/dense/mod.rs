//! Small dense complex linear algebra used by the projected problems and the
//! restart machinery.
//!
//! Everything here targets matrices of modest order (subspace dimension and
//! its linearization, typically well under 100 rows), so the kernels favour
//! clarity and numerical robustness over blocking or parallelism. Storage is
//! column-major so that column slices are contiguous.

mod eig;
mod house;

pub use eig::{dense_eig, smallest_right_singular_vector, DenseEig};
pub use house::{householder_to_last, qr_factor, shifted_qr_sweep, Reflector};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Column-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = DenseMatrix::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from a list of equally long column vectors.
    pub fn from_cols(cols: &[Vec<Complex64>]) -> Self {
        let ncols = cols.len();
        let nrows = if ncols == 0 { 0 } else { cols[0].len() };
        let mut m = DenseMatrix::zeros(nrows, ncols);
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows, "ragged column list");
            m.col_mut(j).copy_from_slice(c);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let bcol = other.col(j);
            let ocol = out.col_mut(j);
            for (l, &b) in bcol.iter().enumerate() {
                if b.norm_sqr() == 0.0 {
                    continue;
                }
                let acol = &self.data[l * self.rows..(l + 1) * self.rows];
                for (o, &a) in ocol.iter_mut().zip(acol) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len(), "matvec dimension mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for (l, &xl) in x.iter().enumerate() {
            if xl.norm_sqr() == 0.0 {
                continue;
            }
            let acol = self.col(l);
            for (o, &a) in out.iter_mut().zip(acol) {
                *o += a * xl;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&mut self, s: Complex64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (o, v) in out.data.iter_mut().zip(&other.data) {
            *o -= v;
        }
        out
    }

    /// Leading `r` x `c` block.
    pub fn leading(&self, r: usize, c: usize) -> DenseMatrix {
        assert!(r <= self.rows && c <= self.cols);
        DenseMatrix::from_fn(r, c, |i, j| self.get(i, j))
    }

    /// Largest magnitude found strictly below the first subdiagonal; zero for
    /// an upper Hessenberg matrix.
    pub fn below_hessenberg_max(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.cols {
            for i in (j + 2)..self.rows {
                worst = worst.max(self.get(i, j).norm());
            }
        }
        worst
    }

    /// Forces exact zeros strictly below the first subdiagonal.
    pub fn clear_below_hessenberg(&mut self) {
        for j in 0..self.cols {
            for i in (j + 2)..self.rows {
                self.set(i, j, Complex64::new(0.0, 0.0));
            }
        }
    }
}

/// Conjugated dot product `sum conj(a_i) b_i`.
#[inline]
pub fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y;
    }
    acc
}

/// Unconjugated dot product `sum a_i b_i`.
#[inline]
pub fn dotu(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

#[inline]
pub fn vec_norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += s * x`.
#[inline]
pub fn axpy(y: &mut [Complex64], s: Complex64, x: &[Complex64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

/// Row vector times matrix: `out_j = sum_i b_i m_ij` (no conjugation).
pub fn row_vec_mul(b: &[Complex64], m: &DenseMatrix) -> Vec<Complex64> {
    assert_eq!(b.len(), m.rows(), "row_vec_mul dimension mismatch");
    (0..m.cols()).map(|j| dotu(b, m.col(j))).collect()
}

/// LU factorization with partial pivoting of a square dense matrix.
pub struct LuFactors {
    lu: DenseMatrix,
    piv: Vec<usize>,
    /// Ratio of largest to smallest pivot magnitude; a cheap conditioning
    /// estimate used to reject numerically singular systems.
    pub pivot_ratio: f64,
}

/// Relative pivot threshold below which elimination is refused.
const SINGULAR_PIVOT_REL: f64 = 1e-13;

pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactors> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch {
            context: format!("lu_factor needs a square matrix, got {}x{}", a.rows(), a.cols()),
        });
    }
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let mut lu = a.clone();
    let mut piv = Vec::with_capacity(n);
    let mut pmax = 0.0f64;
    let mut pmin = f64::INFINITY;
    for k in 0..n {
        let mut best = k;
        let mut best_mag = lu.get(k, k).norm();
        for i in (k + 1)..n {
            let mag = lu.get(i, k).norm();
            if mag > best_mag {
                best = i;
                best_mag = mag;
            }
        }
        if best_mag <= SINGULAR_PIVOT_REL * scale {
            return Err(Error::SingularPivot { step: k });
        }
        piv.push(best);
        if best != k {
            for j in 0..n {
                let t = lu.get(k, j);
                lu.set(k, j, lu.get(best, j));
                lu.set(best, j, t);
            }
        }
        pmax = pmax.max(best_mag);
        pmin = pmin.min(best_mag);
        let pivot = lu.get(k, k);
        for i in (k + 1)..n {
            let l = lu.get(i, k) / pivot;
            lu.set(i, k, l);
            if l.norm_sqr() == 0.0 {
                continue;
            }
            for j in (k + 1)..n {
                let v = lu.get(i, j) - l * lu.get(k, j);
                lu.set(i, j, v);
            }
        }
    }
    Ok(LuFactors {
        lu,
        piv,
        pivot_ratio: if n == 0 { 1.0 } else { pmax / pmin },
    })
}

impl LuFactors {
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows();
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            if xk.norm_sqr() == 0.0 {
                continue;
            }
            for i in (k + 1)..n {
                let l = self.lu.get(i, k);
                x[i] -= l * xk;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in (k + 1)..n {
                s -= self.lu.get(k, j) * x[j];
            }
            x[k] = s / self.lu.get(k, k);
        }
        x
    }

    pub fn solve_mat(&self, b: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let col = self.solve(b.col(j));
            out.col_mut(j).copy_from_slice(&col);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-12;

    pub(crate) fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| {
            c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
        })
    }

    #[test]
    fn matmul_identity_and_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 5, 5);
        let i5 = DenseMatrix::identity(5);
        assert!(a.matmul(&i5).sub(&a).frobenius_norm() < TOL);
        assert!(i5.matmul(&a).sub(&a).frobenius_norm() < TOL);
        // (A B)^H = B^H A^H
        let b = random_matrix(&mut rng, 5, 3);
        let lhs = a.matmul(&b).adjoint();
        let rhs = b.adjoint().matmul(&a.adjoint());
        assert!(lhs.sub(&rhs).frobenius_norm() < TOL);
    }

    #[test]
    fn dot_products_match_definitions() {
        let a = vec![c(1.0, 2.0), c(-1.0, 0.5)];
        let b = vec![c(0.5, 0.0), c(2.0, -1.0)];
        let d = cdot(&a, &b);
        // conj(1+2i)*(0.5) + conj(-1+0.5i)*(2-i)
        let expect = c(1.0, -2.0) * c(0.5, 0.0) + c(-1.0, -0.5) * c(2.0, -1.0);
        assert!((d - expect).norm() < TOL);
        let du = dotu(&a, &b);
        let expect_u = c(1.0, 2.0) * c(0.5, 0.0) + c(-1.0, 0.5) * c(2.0, -1.0);
        assert!((du - expect_u).norm() < TOL);
    }

    #[test]
    fn lu_solves_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let n = 2 + (trial % 9);
            let mut a = random_matrix(&mut rng, n, n);
            // Push mass onto the diagonal so the systems stay well conditioned.
            for i in 0..n {
                let d = a.get(i, i) + c(3.0, 0.0);
                a.set(i, i, d);
            }
            let x_true: Vec<Complex64> =
                (0..n).map(|_| c(rng.gen::<f64>(), rng.gen::<f64>())).collect();
            let b = a.matvec(&x_true);
            let f = lu_factor(&a).unwrap();
            let x = f.solve(&b);
            let err: f64 = x
                .iter()
                .zip(&x_true)
                .map(|(u, v)| (u - v).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err < 1e-10, "trial {trial}: solve error {err}");
        }
    }

    #[test]
    fn lu_rejects_singular_matrix() {
        let mut a = DenseMatrix::zeros(3, 3);
        a.set(0, 0, c(1.0, 0.0));
        a.set(1, 1, c(1.0, 0.0));
        // Third row/column identically zero.
        match lu_factor(&a) {
            Err(Error::SingularPivot { .. }) => {}
            other => panic!("expected SingularPivot, got {other:?}"),
        }
    }

    #[test]
    fn hessenberg_defect_helpers() {
        let mut a = DenseMatrix::zeros(4, 4);
        a.set(3, 0, c(0.25, 0.0));
        assert!((a.below_hessenberg_max() - 0.25).abs() < TOL);
        a.clear_below_hessenberg();
        assert_eq!(a.below_hessenberg_max(), 0.0);
    }
}
