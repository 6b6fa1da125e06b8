//! Dense complex eigensolver (Schur form via shifted Hessenberg QR with
//! deflation) and a smallest-singular-vector kernel built on top of it.
//!
//! Problems arriving here are projections of dimension at most a few dozen,
//! so an unblocked single-shift iteration is entirely adequate.

use num_complex::Complex64;

use super::house::reflector_to_position;
use super::{cdot, lu_factor, vec_norm, DenseMatrix};
use crate::error::{Error, Result};

/// Full eigendecomposition of a small dense matrix.
pub struct DenseEig {
    /// Eigenvalues, in the order produced by the deflation sequence.
    pub values: Vec<Complex64>,
    /// Unit right eigenvectors, one column per eigenvalue.
    pub vectors: DenseMatrix,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sweep budget per matrix order before giving up.
const MAX_SWEEPS_PER_ORDER: usize = 50;

/// Reduces `a` to upper Hessenberg form `h = u^H a u`, returning `(h, u)`.
fn hessenberg_reduce(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut u = DenseMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let mut x = vec![ZERO; n];
        for i in (k + 1)..n {
            x[i] = h.get(i, k);
        }
        if let Some((w, _)) = reflector_to_position(&x, k + 1) {
            w.apply_left(&mut h);
            w.apply_right(&mut h);
            w.apply_right(&mut u);
        }
        for i in (k + 2)..n {
            h.set(i, k, ZERO);
        }
    }
    (h, u)
}

/// Complex Givens rotation: returns `(c, s)` with `c` real such that
/// `[c, conj(s); -s, c] [a; b] = [r; 0]`.
fn rot(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = (an * an + bn * bn).sqrt();
    (an / r, a.conj() * b / (an * r))
}

/// Applies the rotation to rows `k, k+1` over columns `j0..j1`.
fn rot_rows(h: &mut DenseMatrix, k: usize, c: f64, s: Complex64, j0: usize, j1: usize) {
    for j in j0..j1 {
        let a = h.get(k, j);
        let b = h.get(k + 1, j);
        h.set(k, j, c * a + s.conj() * b);
        h.set(k + 1, j, -s * a + c * b);
    }
}

/// Applies the adjoint rotation to columns `k, k+1` over rows `i0..i1`.
fn rot_cols(h: &mut DenseMatrix, k: usize, c: f64, s: Complex64, i0: usize, i1: usize) {
    for i in i0..i1 {
        let a = h.get(i, k);
        let b = h.get(i, k + 1);
        h.set(i, k, c * a + s * b);
        h.set(i, k + 1, -s.conj() * a + c * b);
    }
}

/// Wilkinson shift from the trailing 2x2 block ending at `hi`.
fn wilkinson_shift(h: &DenseMatrix, hi: usize) -> Complex64 {
    let a = h.get(hi - 1, hi - 1);
    let b = h.get(hi - 1, hi);
    let c = h.get(hi, hi - 1);
    let d = h.get(hi, hi);
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let r1 = (tr + disc) / 2.0;
    let r2 = (tr - disc) / 2.0;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// Eigenvalues and unit right eigenvectors of a square complex matrix.
///
/// Reduces to Hessenberg form, iterates shifted QR sweeps with deflation to a
/// triangular Schur factor, and recovers eigenvectors by back-substitution.
/// Fails with `NoConvergence` if deflation stalls beyond `50 n` sweeps.
pub fn dense_eig(a: &DenseMatrix) -> Result<DenseEig> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch {
            context: format!("dense_eig needs a square matrix, got {}x{}", a.rows(), a.cols()),
        });
    }
    if n == 0 {
        return Ok(DenseEig {
            values: Vec::new(),
            vectors: DenseMatrix::zeros(0, 0),
        });
    }
    let (mut h, mut u) = hessenberg_reduce(a);
    let hnorm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let max_sweeps = MAX_SWEEPS_PER_ORDER * n;
    let mut sweeps = 0usize;
    let mut stagnant = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        // Split off converged eigenvalues and find the active window start.
        let mut lo = hi;
        while lo > 0 {
            let sub = h.get(lo, lo - 1).norm();
            let local = h.get(lo - 1, lo - 1).norm() + h.get(lo, lo).norm();
            let scale = if local == 0.0 { hnorm } else { local };
            if sub <= f64::EPSILON * scale {
                h.set(lo, lo - 1, ZERO);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            stagnant = 0;
            continue;
        }
        if sweeps >= max_sweeps {
            return Err(Error::NoConvergence { sweeps });
        }
        let mu = if stagnant > 0 && stagnant % 12 == 0 {
            // Exceptional shift to break symmetric stalls.
            h.get(hi, hi) + 0.75 * h.get(hi, hi - 1).norm()
        } else {
            wilkinson_shift(&h, hi)
        };
        // Implicit single-shift sweep on the window [lo, hi].
        for k in lo..hi {
            let (x, y) = if k == lo {
                (h.get(lo, lo) - mu, h.get(lo + 1, lo))
            } else {
                (h.get(k, k - 1), h.get(k + 1, k - 1))
            };
            let (c, s) = rot(x, y);
            let j0 = if k > lo { k - 1 } else { lo };
            rot_rows(&mut h, k, c, s, j0, n);
            if k > lo {
                h.set(k + 1, k - 1, ZERO);
            }
            rot_cols(&mut h, k, c, s, 0, (k + 3).min(hi + 1));
            rot_cols(&mut u, k, c, s, 0, n);
        }
        sweeps += 1;
        stagnant += 1;
    }
    h.clear_below_hessenberg();
    for i in 1..n {
        h.set(i, i - 1, ZERO);
    }

    // Back-substitute eigenvectors of the triangular factor, then rotate back.
    let tnorm = h.max_abs().max(f64::MIN_POSITIVE);
    let floor = f64::EPSILON * tnorm;
    let values: Vec<Complex64> = (0..n).map(|i| h.get(i, i)).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    let mut z = vec![ZERO; n];
    for i in 0..n {
        for zj in z.iter_mut() {
            *zj = ZERO;
        }
        z[i] = Complex64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut num = ZERO;
            for (l, zl) in z.iter().enumerate().take(i + 1).skip(j + 1) {
                num += h.get(j, l) * zl;
            }
            let mut den = h.get(j, j) - values[i];
            if den.norm() < floor {
                den = Complex64::new(floor, 0.0);
            }
            z[j] = -num / den;
            let mag = z[j].norm();
            if mag > 1e100 {
                // Rescale to dodge overflow in strongly non-normal cases.
                for zl in z.iter_mut().take(i + 1).skip(j) {
                    *zl /= mag;
                }
            }
        }
        let mut v = u.matvec(&z);
        let nv = vec_norm(&v);
        if nv > 0.0 {
            for vi in &mut v {
                *vi /= nv;
            }
        }
        vectors.col_mut(i).copy_from_slice(&v);
    }
    Ok(DenseEig { values, vectors })
}

/// Smallest singular value of `s` together with the corresponding unit right
/// singular vector.
///
/// Works on the Gram matrix `s^H s`: its smallest eigenpair seeds one step of
/// inverse iteration, and the returned value is `||s z||` evaluated in the
/// original space, so the pair is consistent by construction.
pub fn smallest_right_singular_vector(s: &DenseMatrix) -> Result<(f64, Vec<Complex64>)> {
    let m = s.cols();
    if m == 0 || s.rows() == 0 {
        return Err(Error::DimensionMismatch {
            context: "smallest_right_singular_vector needs a nonempty matrix".into(),
        });
    }
    // Hermitian Gram matrix (symmetrized to kill rounding skew).
    let mut g = DenseMatrix::zeros(m, m);
    for j in 0..m {
        for i in 0..=j {
            let v = cdot(s.col(i), s.col(j));
            g.set(i, j, v);
            if i != j {
                g.set(j, i, v.conj());
            } else {
                g.set(i, j, Complex64::new(v.re, 0.0));
            }
        }
    }
    let eig = dense_eig(&g)?;
    let mut best = 0;
    for (i, v) in eig.values.iter().enumerate() {
        if v.re < eig.values[best].re {
            best = i;
        }
    }
    let z0 = eig.vectors.col(best).to_vec();
    let norm_sz = |z: &[Complex64]| vec_norm(&s.matvec(z));
    let mut best_z = z0.clone();
    let mut best_sigma = norm_sz(&z0);

    // One inverse-iteration step sharpens the direction when the Gram
    // eigenvalue is tiny relative to ||G||.
    let gnorm = g.max_abs().max(f64::MIN_POSITIVE);
    let tau = eig.values[best].re - 1e-14 * gnorm;
    let mut shifted = g.clone();
    for i in 0..m {
        shifted.set(i, i, shifted.get(i, i) - Complex64::new(tau, 0.0));
    }
    if let Ok(f) = lu_factor(&shifted) {
        let mut z1 = f.solve(&z0);
        let nz = vec_norm(&z1);
        if nz.is_finite() && nz > 0.0 {
            for v in &mut z1 {
                *v /= nz;
            }
            let sigma1 = norm_sz(&z1);
            if sigma1.is_finite() && sigma1 < best_sigma {
                best_sigma = sigma1;
                best_z = z1;
            }
        }
    }
    Ok((best_sigma, best_z))
}
