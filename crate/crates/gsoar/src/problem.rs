//! Quadratic eigenvalue problem container and spectral transforms.
//!
//! The solver works on the monic-style operator pair of a quadratic pencil
//! `mu^2 Mass + mu Damp + Stiff`, applying `A = -Mass^{-1} Damp` and
//! `B = -Mass^{-1} Stiff` through one sparse factorization. In direct mode
//! the pencil is the original problem and `mu = lambda`; in shift-invert mode
//! the substitution `lambda = sigma + 1/mu` turns eigenvalues near `sigma`
//! into the dominant `mu`, which is what the projection method converges to
//! fastest.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sparse::{sparse_linear_combination, BandedLu, SparseMatrix};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The quadratic eigenvalue problem `(lambda^2 M + lambda C + K) x = 0`.
pub struct QepProblem {
    pub m: SparseMatrix,
    pub c: SparseMatrix,
    pub k: SparseMatrix,
    norm_m: f64,
    norm_c: f64,
    norm_k: f64,
}

impl QepProblem {
    pub fn new(m: SparseMatrix, c: SparseMatrix, k: SparseMatrix) -> Result<Self> {
        let n = m.n_rows();
        for (mat, name) in [(&m, "M"), (&c, "C"), (&k, "K")] {
            if mat.n_rows() != n || mat.n_cols() != n {
                return Err(Error::DimensionMismatch {
                    context: format!(
                        "{name} is {}x{}, expected {n}x{n}",
                        mat.n_rows(),
                        mat.n_cols()
                    ),
                });
            }
        }
        let norm_m = m.frobenius_norm();
        let norm_c = c.frobenius_norm();
        let norm_k = k.frobenius_norm();
        Ok(QepProblem {
            m,
            c,
            k,
            norm_m,
            norm_c,
            norm_k,
        })
    }

    pub fn dim(&self) -> usize {
        self.m.n_rows()
    }

    /// Relative residual `||(l^2 M + l C + K) y|| / (|l|^2 ||M||_F + |l| ||C||_F + ||K||_F)`
    /// for a unit vector `y`.
    pub fn relative_residual(&self, lambda: Complex64, y: &[Complex64]) -> f64 {
        let my = self.m.matvec(y);
        let cy = self.c.matvec(y);
        let ky = self.k.matvec(y);
        let l2 = lambda * lambda;
        let mut num = 0.0f64;
        for i in 0..y.len() {
            num += (l2 * my[i] + lambda * cy[i] + ky[i]).norm_sqr();
        }
        let num = num.sqrt();
        let den = lambda.norm_sqr() * self.norm_m + lambda.norm() * self.norm_c + self.norm_k;
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }
}

/// How the original eigenvalue parameter is mapped before projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformMode {
    /// Work on the problem as given; converges to largest `|lambda|`.
    Direct,
    /// Substitute `lambda = sigma + 1/mu`; converges to `lambda` nearest `sigma`.
    ShiftInvert,
}

/// Factored operator pair of the (possibly transformed) quadratic pencil.
pub struct SpectralTransform {
    mode: TransformMode,
    sigma: Complex64,
    lu: BandedLu,
    mu_mass: SparseMatrix,
    mu_damp: SparseMatrix,
    mu_stiff: SparseMatrix,
}

/// Builds the transform, factoring the pencil's mass matrix once.
///
/// Direct mode factors `M`; shift-invert factors `K_sigma = sigma^2 M +
/// sigma C + K` and fails with `SingularPivot` if `sigma` is (numerically)
/// an eigenvalue.
pub fn build_transform(
    p: &QepProblem,
    mode: TransformMode,
    sigma: Complex64,
) -> Result<SpectralTransform> {
    match mode {
        TransformMode::Direct => {
            let lu = BandedLu::factor(&p.m)?;
            Ok(SpectralTransform {
                mode,
                sigma: Complex64::new(0.0, 0.0),
                lu,
                mu_mass: p.m.clone(),
                mu_damp: p.c.clone(),
                mu_stiff: p.k.clone(),
            })
        }
        TransformMode::ShiftInvert => {
            let k_sigma = sparse_linear_combination(&[
                (sigma * sigma, &p.m),
                (sigma, &p.c),
                (ONE, &p.k),
            ])?;
            let c_sigma =
                sparse_linear_combination(&[(2.0 * sigma, &p.m), (ONE, &p.c)])?;
            let lu = BandedLu::factor(&k_sigma)?;
            Ok(SpectralTransform {
                mode,
                sigma,
                lu,
                mu_mass: k_sigma,
                mu_damp: c_sigma,
                mu_stiff: p.m.clone(),
            })
        }
    }
}

impl SpectralTransform {
    pub fn mode(&self) -> TransformMode {
        self.mode
    }

    pub fn sigma(&self) -> Complex64 {
        self.sigma
    }

    /// Coefficients of the mu-domain pencil `mu^2 Mass + mu Damp + Stiff`.
    pub fn mu_coefficients(&self) -> (&SparseMatrix, &SparseMatrix, &SparseMatrix) {
        (&self.mu_mass, &self.mu_damp, &self.mu_stiff)
    }

    /// `A v = -Mass^{-1} Damp v`.
    pub fn apply_a(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut w = self.lu.solve(&self.mu_damp.matvec(v));
        for x in &mut w {
            *x = -*x;
        }
        w
    }

    /// `B v = -Mass^{-1} Stiff v`.
    pub fn apply_b(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut w = self.lu.solve(&self.mu_stiff.matvec(v));
        for x in &mut w {
            *x = -*x;
        }
        w
    }

    /// `A q + B p` with a single triangular solve.
    pub fn apply_operator(&self, q: &[Complex64], p: &[Complex64]) -> Vec<Complex64> {
        let mut rhs = self.mu_damp.matvec(q);
        let sp = self.mu_stiff.matvec(p);
        for (r, s) in rhs.iter_mut().zip(&sp) {
            *r += s;
        }
        let mut w = self.lu.solve(&rhs);
        for x in &mut w {
            *x = -*x;
        }
        w
    }

    /// Maps a mu-domain eigenvalue back to the original parameter.
    pub fn map_eigenvalue(&self, mu: Complex64) -> Result<Complex64> {
        match self.mode {
            TransformMode::Direct => Ok(mu),
            TransformMode::ShiftInvert => {
                if mu.norm() < 1e-290 {
                    return Err(Error::ZeroMu);
                }
                Ok(self.sigma + mu.inv())
            }
        }
    }

    /// Sort key placing the most wanted eigenvalue first: dominant `|mu|`
    /// corresponds to largest `|lambda|` (direct) or `lambda` nearest
    /// `sigma` (shift-invert).
    pub fn dominance(&self, mu: Complex64) -> f64 {
        mu.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::vec_norm;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_sparse(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> SparseMatrix {
        let mut trips = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if rng.gen::<f64>() < 0.4 || i == j {
                    let mut v = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                    if i == j {
                        v += c(shift, 0.0);
                    }
                    trips.push((i, j, v));
                }
            }
        }
        SparseMatrix::from_triplets(n, n, &trips).unwrap()
    }

    fn random_problem(rng: &mut ChaCha8Rng, n: usize) -> QepProblem {
        QepProblem::new(
            random_sparse(rng, n, 3.0),
            random_sparse(rng, n, 0.0),
            random_sparse(rng, n, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn scalar_problem_residual_is_exact() {
        // (lambda^2 - 4) x = 0 with M = 1, C = 0, K = -4: eigenvalues +-2.
        let m = SparseMatrix::from_triplets(1, 1, &[(0, 0, c(1.0, 0.0))]).unwrap();
        let cm = SparseMatrix::from_triplets(1, 1, &[]).unwrap();
        let k = SparseMatrix::from_triplets(1, 1, &[(0, 0, c(-4.0, 0.0))]).unwrap();
        let p = QepProblem::new(m, cm, k).unwrap();
        let y = [c(1.0, 0.0)];
        assert!(p.relative_residual(c(2.0, 0.0), &y) < 1e-15);
        // At lambda = 3: |9 - 4| / (9 * 1 + 0 + 4) = 5/13.
        let r = p.relative_residual(c(3.0, 0.0), &y);
        assert!((r - 5.0 / 13.0).abs() < 1e-14);
    }

    #[test]
    fn shift_invert_coefficients_satisfy_the_substitution_identity() {
        // mu^2 K_sigma + mu C_sigma + M = mu^2 (lambda^2 M + lambda C + K)
        // whenever lambda = sigma + 1/mu, for any vector.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 8;
        let p = random_problem(&mut rng, n);
        let sigma = c(0.7, -0.3);
        let tr = build_transform(&p, TransformMode::ShiftInvert, sigma).unwrap();
        let (mass, damp, stiff) = tr.mu_coefficients();
        for _ in 0..5 {
            let lambda = c(rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0);
            let mu = (lambda - sigma).inv();
            let x: Vec<Complex64> = (0..n).map(|_| c(rng.gen(), rng.gen())).collect();
            let mx = mass.matvec(&x);
            let dx = damp.matvec(&x);
            let sx = stiff.matvec(&x);
            let qm = p.m.matvec(&x);
            let qc = p.c.matvec(&x);
            let qk = p.k.matvec(&x);
            let mut defect = 0.0f64;
            for i in 0..n {
                let lhs = mu * mu * mx[i] + mu * dx[i] + sx[i];
                let rhs = mu * mu * (lambda * lambda * qm[i] + lambda * qc[i] + qk[i]);
                defect += (lhs - rhs).norm_sqr();
            }
            assert!(defect.sqrt() < 1e-10, "identity defect {}", defect.sqrt());
        }
    }

    #[test]
    fn apply_operator_equals_split_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let n = 10;
        let p = random_problem(&mut rng, n);
        for (mode, sigma) in [
            (TransformMode::Direct, c(0.0, 0.0)),
            (TransformMode::ShiftInvert, c(0.4, 0.8)),
        ] {
            let tr = build_transform(&p, mode, sigma).unwrap();
            let q: Vec<Complex64> = (0..n).map(|_| c(rng.gen(), rng.gen())).collect();
            let pv: Vec<Complex64> = (0..n).map(|_| c(rng.gen(), rng.gen())).collect();
            let combined = tr.apply_operator(&q, &pv);
            let mut split = tr.apply_a(&q);
            let bp = tr.apply_b(&pv);
            for (s, b) in split.iter_mut().zip(&bp) {
                *s += b;
            }
            let err: f64 = combined
                .iter()
                .zip(&split)
                .map(|(u, v)| (u - v).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err < 1e-11 * vec_norm(&combined).max(1.0));
        }
    }

    #[test]
    fn eigenvalue_map_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let p = random_problem(&mut rng, 6);
        let sigma = c(-2.0, 0.5);
        let tr = build_transform(&p, TransformMode::ShiftInvert, sigma).unwrap();
        let lambda = c(1.25, -0.75);
        let mu = (lambda - sigma).inv();
        let back = tr.map_eigenvalue(mu).unwrap();
        assert!((back - lambda).norm() < 1e-13);
        assert!(matches!(
            tr.map_eigenvalue(c(0.0, 0.0)),
            Err(Error::ZeroMu)
        ));
        let td = build_transform(&p, TransformMode::Direct, c(0.0, 0.0)).unwrap();
        assert_eq!(td.map_eigenvalue(mu).unwrap(), mu);
    }

    #[test]
    fn direct_mode_inverts_the_mass_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let n = 7;
        let p = random_problem(&mut rng, n);
        let tr = build_transform(&p, TransformMode::Direct, c(0.0, 0.0)).unwrap();
        let v: Vec<Complex64> = (0..n).map(|_| c(rng.gen(), rng.gen())).collect();
        // M * (A v) should equal -C v.
        let av = tr.apply_a(&v);
        let mav = p.m.matvec(&av);
        let cv = p.c.matvec(&v);
        let err: f64 = mav
            .iter()
            .zip(&cv)
            .map(|(u, w)| (u + w).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-10 * vec_norm(&cv).max(1.0));
    }
}
