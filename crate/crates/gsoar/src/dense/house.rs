//! Householder reflectors, explicit QR, and single shifted QR sweeps on
//! Hessenberg matrices.
//!
//! Reflectors are kept in factored form `W = I - beta v v^H` with real beta,
//! which makes every `W` both unitary and self-adjoint. The shifted sweep is
//! the building block of the implicit restart: it factors `T - mu I = V R`
//! explicitly and forms the similarity `T' = R V + mu I`, which preserves the
//! Hessenberg structure with exact zeros below the subdiagonal.

use num_complex::Complex64;

use super::{cdot, row_vec_mul, vec_norm, DenseMatrix};
use crate::error::{Error, Result};

/// Householder reflector `W = I - beta v v^H` (unitary and self-adjoint).
#[derive(Debug, Clone)]
pub struct Reflector {
    pub v: Vec<Complex64>,
    pub beta: f64,
}

impl Reflector {
    /// The identity, used when a row or column is already annihilated.
    pub fn identity(n: usize) -> Self {
        Reflector {
            v: vec![Complex64::new(0.0, 0.0); n],
            beta: 0.0,
        }
    }

    /// `A <- W A`.
    pub fn apply_left(&self, a: &mut DenseMatrix) {
        assert_eq!(a.rows(), self.v.len());
        if self.beta == 0.0 {
            return;
        }
        for j in 0..a.cols() {
            let col = a.col_mut(j);
            let w = cdot(&self.v, col) * self.beta;
            for (c, &vi) in col.iter_mut().zip(&self.v) {
                *c -= w * vi;
            }
        }
    }

    /// `A <- A W`.
    pub fn apply_right(&self, a: &mut DenseMatrix) {
        assert_eq!(a.cols(), self.v.len());
        if self.beta == 0.0 {
            return;
        }
        let u = a.matvec(&self.v);
        for (j, &vj) in self.v.iter().enumerate() {
            let s = vj.conj() * self.beta;
            if s.norm_sqr() == 0.0 {
                continue;
            }
            let col = a.col_mut(j);
            for (c, &ui) in col.iter_mut().zip(&u) {
                *c -= s * ui;
            }
        }
    }

    /// `x <- W x`.
    pub fn apply_vec(&self, x: &mut [Complex64]) {
        assert_eq!(x.len(), self.v.len());
        if self.beta == 0.0 {
            return;
        }
        let w = cdot(&self.v, x) * self.beta;
        for (c, &vi) in x.iter_mut().zip(&self.v) {
            *c -= w * vi;
        }
    }

    /// Materializes `W` as a dense matrix.
    pub fn to_matrix(&self) -> DenseMatrix {
        let mut m = DenseMatrix::identity(self.v.len());
        self.apply_right(&mut m);
        m
    }
}

/// Builds the self-adjoint reflector sending `x` to `alpha e_target`, with
/// `|alpha| = ||x||`. Returns `None` for a zero vector.
pub(crate) fn reflector_to_position(x: &[Complex64], target: usize) -> Option<(Reflector, Complex64)> {
    let rho = vec_norm(x);
    if rho == 0.0 {
        return None;
    }
    let xt = x[target];
    // Phase chosen so v = x - alpha e_target suffers no cancellation.
    let phase = if xt.norm() > 0.0 { xt / xt.norm() } else { Complex64::new(1.0, 0.0) };
    let alpha = -phase * rho;
    let mut v = x.to_vec();
    v[target] -= alpha;
    let vnorm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    if vnorm2 == 0.0 {
        // x itself was alpha e_target; reflecting is unnecessary.
        return Some((Reflector::identity(x.len()), xt));
    }
    Some((Reflector { v, beta: 2.0 / vnorm2 }, alpha))
}

/// Self-adjoint unitary `W` with `W b = alpha e_m` (last coordinate) and
/// `|alpha| = ||b||`.
///
/// Because `W` is self-adjoint, the same factor concentrates a row vector
/// into its last entry: if `w = conj(b)` then `b W = conj(alpha) e_m^T`.
pub fn householder_to_last(b: &[Complex64]) -> Result<(Reflector, Complex64)> {
    match reflector_to_position(b, b.len() - 1) {
        Some(pair) => Ok(pair),
        None => Err(Error::ZeroVector),
    }
}

/// Householder QR factorization `A = V R` with `V` unitary and `R` upper
/// triangular (exact zeros below the diagonal). Rank-deficient columns are
/// skipped rather than rejected.
pub fn qr_factor(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let m = a.rows();
    let n = a.cols();
    let mut r = a.clone();
    let mut v = DenseMatrix::identity(m);
    let steps = n.min(m.saturating_sub(1));
    for k in 0..steps {
        let mut x = vec![Complex64::new(0.0, 0.0); m];
        for i in k..m {
            x[i] = r.get(i, k);
        }
        if let Some((h, _)) = reflector_to_position(&x, k) {
            h.apply_left(&mut r);
            h.apply_right(&mut v);
        }
    }
    for j in 0..n {
        for i in (j + 1)..m {
            r.set(i, j, Complex64::new(0.0, 0.0));
        }
    }
    (v, r)
}

/// One explicit shifted QR sweep on an upper Hessenberg matrix.
///
/// Factors `T - mu I = V R`, returns `T' = R V + mu I` (again Hessenberg,
/// similar to `T` via `T' = V^H T V`), the updated residual row `b' = b V`,
/// and `V` for accumulation. Entries of `T` below the first subdiagonal must
/// be negligible; they are dropped before factoring, which also makes the
/// sweep robust when `T` is reducible.
pub fn shifted_qr_sweep(
    t: &DenseMatrix,
    b: &[Complex64],
    mu: Complex64,
) -> (DenseMatrix, Vec<Complex64>, DenseMatrix) {
    let m = t.rows();
    assert_eq!(t.cols(), m, "sweep needs a square matrix");
    assert_eq!(b.len(), m, "residual row length mismatch");
    let mut s = t.clone();
    s.clear_below_hessenberg();
    for i in 0..m {
        s.set(i, i, s.get(i, i) - mu);
    }
    let (v, r) = qr_factor(&s);
    let mut t_next = r.matmul(&v);
    for i in 0..m {
        t_next.set(i, i, t_next.get(i, i) + mu);
    }
    let b_next = row_vec_mul(b, &v);
    (t_next, b_next, v)
}
