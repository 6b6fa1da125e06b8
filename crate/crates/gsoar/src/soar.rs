//! Generalized second-order Arnoldi (GSOAR) decomposition.
//!
//! For the operator pair `(A, B)` the procedure builds an orthonormal basis
//! `Q_{j+1}` of the generalized second-order Krylov subspace spanned by
//! `r_0 = u_1`, `r_1 = A r_0 + B u_2`, `r_i = A r_{i-1} + B r_{i-2}`,
//! together with auxiliary columns `P_{j+1}` and an upper Hessenberg
//! `(j+1) x j` matrix `T` satisfying the stacked relation
//!
//! ```text
//! A Q_j + B P_j = Q_{j+1} T,      Q_j = P_{j+1} T,
//! ```
//!
//! which is the two-block form of an Arnoldi relation for the linearized
//! operator. When a continuation vector lies in the span of the current
//! basis, the step either deflates (the auxiliary direction is still new:
//! a zero `q` column is recorded and the process continues) or breaks down
//! (the generalized Krylov space is exhausted).

use num_complex::Complex64;

use crate::dense::{axpy, cdot, vec_norm, DenseMatrix};
use crate::error::{Error, Result};
use crate::problem::SpectralTransform;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative drop in `||r||` that triggers a second orthogonalization pass.
const REORTH_THRESHOLD: f64 = 0.707;

/// `||r||` below `BREAKDOWN_REL * max_j ||r_j||` is treated as zero.
const BREAKDOWN_REL: f64 = 1e-12;

/// Least-squares residual threshold for membership in the deflated span.
const DEFLATED_SPAN_REL: f64 = 1e-10;

/// The growable GSOAR decomposition after `j` steps.
pub struct GsoarDecomposition {
    n: usize,
    q_cols: Vec<Vec<Complex64>>,
    p_cols: Vec<Vec<Complex64>>,
    /// Column `c` holds rows `0..=c+1` of the Hessenberg factor.
    t_cols: Vec<Vec<Complex64>>,
    deflated: Vec<usize>,
    /// Running maximum of `||r||` before orthogonalization; scales the
    /// breakdown tolerance.
    rmax: f64,
}

impl GsoarDecomposition {
    /// Starts the process from `q_1 = u_1 / ||u_1||`, `p_1 = u_2 / ||u_1||`
    /// (one common scale factor preserves the stacked recurrence).
    pub fn start(u1: &[Complex64], u2: &[Complex64]) -> Result<Self> {
        let n = u1.len();
        if u2.len() != n {
            return Err(Error::DimensionMismatch {
                context: "starting vectors differ in length".into(),
            });
        }
        let nrm = vec_norm(u1);
        if nrm == 0.0 {
            return Err(Error::ZeroStart);
        }
        let q1: Vec<Complex64> = u1.iter().map(|v| v / nrm).collect();
        let p1: Vec<Complex64> = u2.iter().map(|v| v / nrm).collect();
        Ok(GsoarDecomposition {
            n,
            q_cols: vec![q1],
            p_cols: vec![p1],
            t_cols: Vec::new(),
            deflated: Vec::new(),
            rmax: 0.0,
        })
    }

    /// Second-order Arnoldi variant: single starting vector, `p_1 = 0`.
    pub fn start_soar(u1: &[Complex64]) -> Result<Self> {
        let zeros = vec![ZERO; u1.len()];
        GsoarDecomposition::start(u1, &zeros)
    }

    /// Number of completed steps `j` (the basis has `j + 1` column pairs).
    pub fn steps(&self) -> usize {
        self.t_cols.len()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn q_col(&self, i: usize) -> &[Complex64] {
        &self.q_cols[i]
    }

    pub fn p_col(&self, i: usize) -> &[Complex64] {
        &self.p_cols[i]
    }

    /// Indices of deflated (zero) `q` columns.
    pub fn deflated(&self) -> &[usize] {
        &self.deflated
    }

    pub fn rmax(&self) -> f64 {
        self.rmax
    }

    /// Indices of the nonzero `q` columns among the first `j` columns.
    pub fn nonzero_q_indices(&self) -> Vec<usize> {
        (0..self.steps())
            .filter(|i| !self.deflated.contains(i))
            .collect()
    }

    /// The nonzero `q` columns among the first `j`, cloned in order.
    pub fn nonzero_q_basis(&self) -> Vec<Vec<Complex64>> {
        self.nonzero_q_indices()
            .into_iter()
            .map(|i| self.q_cols[i].clone())
            .collect()
    }

    /// The `(j+1) x j` Hessenberg factor.
    pub fn t_hat(&self) -> DenseMatrix {
        let j = self.steps();
        let mut t = DenseMatrix::zeros(j + 1, j);
        for (c, col) in self.t_cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                t.set(i, c, v);
            }
        }
        t
    }

    /// The square `j x j` leading part of `T` together with the trailing
    /// subdiagonal entry `t_{j+1,j}`.
    pub fn t_square(&self) -> (DenseMatrix, Complex64) {
        let j = self.steps();
        let full = self.t_hat();
        (full.leading(j, j), if j == 0 { ZERO } else { full.get(j, j - 1) })
    }

    /// Runs GSOAR steps until `target` steps are complete.
    ///
    /// A step whose continuation norm falls below the breakdown tolerance
    /// either deflates (recording a zero `q` column with `t_{j+1,j} = 1`) or,
    /// when even the auxiliary vector lies in the span of previously deflated
    /// auxiliaries, stops with `Breakdown`.
    pub fn extend(&mut self, tr: &SpectralTransform, target: usize) -> Result<()> {
        if target > self.n {
            return Err(Error::InvalidConfig(format!(
                "cannot run {target} steps in dimension {}",
                self.n
            )));
        }
        while self.steps() < target {
            self.step(tr)?;
        }
        Ok(())
    }

    fn step(&mut self, tr: &SpectralTransform) -> Result<()> {
        let j = self.steps(); // producing column j + 1 (0-based index j + 1)
        let q_j = &self.q_cols[j];
        let p_j = &self.p_cols[j];
        let mut r = tr.apply_operator(q_j, p_j);
        let mut s = q_j.clone();
        let r0 = vec_norm(&r);
        self.rmax = self.rmax.max(r0);

        let cols = j + 1;
        let mut t = vec![ZERO; cols + 1];
        // Modified Gram-Schmidt; the same coefficients update `s` so both
        // block rows of the stacked relation stay consistent.
        let mut pass = |r: &mut Vec<Complex64>, s: &mut Vec<Complex64>, t: &mut Vec<Complex64>| {
            for i in 0..cols {
                let h = cdot(&self.q_cols[i], r);
                if h != ZERO {
                    axpy(r, -h, &self.q_cols[i]);
                    axpy(s, -h, &self.p_cols[i]);
                    t[i] += h;
                }
            }
        };
        pass(&mut r, &mut s, &mut t);
        if vec_norm(&r) < REORTH_THRESHOLD * r0 {
            pass(&mut r, &mut s, &mut t);
        }
        let rnorm = vec_norm(&r);
        let tol = BREAKDOWN_REL * self.rmax;
        if rnorm > tol {
            t[cols] = Complex64::new(rnorm, 0.0);
            let inv = 1.0 / rnorm;
            self.q_cols.push(r.iter().map(|v| v * inv).collect());
            self.p_cols.push(s.iter().map(|v| v * inv).collect());
        } else if self.in_deflated_span(&s) {
            return Err(Error::Breakdown { step: j + 1 });
        } else {
            // Deflation: the q direction is exhausted but the auxiliary
            // vector is new; keep it with an exact unit subdiagonal entry.
            t[cols] = Complex64::new(1.0, 0.0);
            self.q_cols.push(vec![ZERO; self.n]);
            self.p_cols.push(s);
            self.deflated.push(cols);
        }
        self.t_cols.push(t);
        Ok(())
    }

    /// Least-squares membership test of `s` in the span of the deflated
    /// auxiliary columns.
    fn in_deflated_span(&self, s: &[Complex64]) -> bool {
        let snorm = vec_norm(s);
        let mut resid = s.to_vec();
        let mut basis: Vec<Vec<Complex64>> = Vec::new();
        for &i in &self.deflated {
            let mut w = self.p_cols[i].clone();
            for b in &basis {
                let h = cdot(b, &w);
                axpy(&mut w, -h, b);
            }
            let nw = vec_norm(&w);
            if nw > 1e-14 * vec_norm(&self.p_cols[i]).max(1e-300) {
                for v in &mut w {
                    *v /= nw;
                }
                basis.push(w);
            }
        }
        for b in &basis {
            let h = cdot(b, &resid);
            axpy(&mut resid, -h, b);
        }
        vec_norm(&resid) <= DEFLATED_SPAN_REL * snorm
    }

    /// Replaces the trailing column pair (the continuation direction) and its
    /// subdiagonal entry; used by the driver to re-seed after the subspace
    /// became invariant.
    pub(crate) fn replace_continuation(
        &mut self,
        q: Vec<Complex64>,
        p: Vec<Complex64>,
        t_last: Complex64,
    ) {
        let j = self.steps();
        assert!(j > 0, "cannot reseed before any step ran");
        self.q_cols[j] = q;
        self.p_cols[j] = p;
        let col = &mut self.t_cols[j - 1];
        let last = col.len() - 1;
        col[last] = t_last;
    }

    /// Rebuilds a decomposition directly from stored columns; only for the
    /// restart stage, which guarantees the stacked relation already holds.
    pub(crate) fn from_parts(
        n: usize,
        q_cols: Vec<Vec<Complex64>>,
        p_cols: Vec<Vec<Complex64>>,
        t_cols: Vec<Vec<Complex64>>,
        rmax: f64,
    ) -> Self {
        GsoarDecomposition {
            n,
            q_cols,
            p_cols,
            t_cols,
            deflated: Vec::new(),
            rmax,
        }
    }

    /// Frobenius defects of the two block rows of the stacked relation and
    /// the worst orthonormality defect, all relative. Used by tests and the
    /// optional per-cycle verification in the driver.
    pub fn relation_defects(&self, tr: &SpectralTransform) -> (f64, f64, f64) {
        let j = self.steps();
        if j == 0 {
            return (0.0, 0.0, 0.0);
        }
        let t = self.t_hat();
        let mut top = 0.0f64;
        let mut top_scale = 0.0f64;
        let mut bottom = 0.0f64;
        for c in 0..j {
            let w = tr.apply_operator(&self.q_cols[c], &self.p_cols[c]);
            top_scale += w.iter().map(|v| v.norm_sqr()).sum::<f64>();
            let mut rq = w;
            let mut rp: Vec<Complex64> = self.q_cols[c].clone();
            for i in 0..=j {
                let tic = t.get(i, c);
                if tic != ZERO {
                    axpy(&mut rq, -tic, &self.q_cols[i]);
                    axpy(&mut rp, -tic, &self.p_cols[i]);
                }
            }
            top += rq.iter().map(|v| v.norm_sqr()).sum::<f64>();
            bottom += rp.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        let top_scale = top_scale.sqrt().max(t.frobenius_norm()).max(1e-300);
        let bot_scale = (j as f64).sqrt();
        let nz = self.nonzero_q_indices();
        let mut orth = 0.0f64;
        for (a, &ia) in nz.iter().enumerate() {
            for &ib in nz.iter().skip(a) {
                let d = cdot(&self.q_cols[ia], &self.q_cols[ib]);
                let want = if ia == ib { 1.0 } else { 0.0 };
                orth = orth.max((d - Complex64::new(want, 0.0)).norm());
            }
        }
        (top.sqrt() / top_scale, bottom.sqrt() / bot_scale, orth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{build_transform, QepProblem, TransformMode};
    use crate::sparse::SparseMatrix;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
            .collect()
    }

    fn random_problem(rng: &mut ChaCha8Rng, n: usize) -> QepProblem {
        let mut mk = |shift: f64| {
            let mut trips = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if rng.gen::<f64>() < 0.5 || i == j {
                        let mut v = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                        if i == j {
                            v += c(shift, 0.0);
                        }
                        trips.push((i, j, v));
                    }
                }
            }
            SparseMatrix::from_triplets(n, n, &trips).unwrap()
        };
        let m = mk(3.0);
        let cm = mk(0.0);
        let k = mk(0.0);
        QepProblem::new(m, cm, k).unwrap()
    }

    #[test]
    fn zero_start_is_rejected() {
        let u1 = vec![c(0.0, 0.0); 4];
        let u2 = vec![c(1.0, 0.0); 4];
        assert!(matches!(
            GsoarDecomposition::start(&u1, &u2),
            Err(Error::ZeroStart)
        ));
    }

    #[test]
    fn relation_holds_through_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let n = 24;
        let p = random_problem(&mut rng, n);
        let tr = build_transform(&p, TransformMode::ShiftInvert, c(0.3, 0.1)).unwrap();
        let mut d =
            GsoarDecomposition::start(&random_vec(&mut rng, n), &random_vec(&mut rng, n)).unwrap();
        d.extend(&tr, 12).unwrap();
        assert_eq!(d.steps(), 12);
        assert!(d.deflated().is_empty());
        let (top, bottom, orth) = d.relation_defects(&tr);
        assert!(top < 1e-10, "top block defect {top}");
        assert!(bottom < 1e-10, "bottom block defect {bottom}");
        assert!(orth < 1e-12, "orthonormality defect {orth}");

        // The Hessenberg factor has positive real subdiagonal entries here.
        let t = d.t_hat();
        for j in 0..12 {
            let sub = t.get(j + 1, j);
            assert!(sub.im == 0.0 && sub.re > 0.0);
        }
    }

    #[test]
    fn basis_spans_the_generalized_krylov_sequence() {
        // Brute-force sequence: r_0 = u1, r_1 = A r_0 + B u2,
        // r_i = A r_{i-1} + B r_{i-2}; the q basis must span it.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let n = 18;
        let p = random_problem(&mut rng, n);
        let tr = build_transform(&p, TransformMode::Direct, c(0.0, 0.0)).unwrap();
        let u1 = random_vec(&mut rng, n);
        let u2 = random_vec(&mut rng, n);
        let steps = 7;
        let mut d = GsoarDecomposition::start(&u1, &u2).unwrap();
        d.extend(&tr, steps).unwrap();

        let mut seq: Vec<Vec<Complex64>> = vec![u1.clone()];
        let mut prev = u2.clone();
        for _ in 1..steps {
            let next = tr.apply_operator(seq.last().unwrap(), &prev);
            prev = seq.last().unwrap().clone();
            seq.push(next);
        }
        let basis = d.nonzero_q_basis();
        assert_eq!(basis.len(), steps, "unexpected deflation in generic run");
        for (i, r) in seq.iter().enumerate() {
            let mut resid = r.clone();
            for b in &basis {
                let h = cdot(b, &resid);
                axpy(&mut resid, -h, b);
            }
            assert!(
                vec_norm(&resid) <= 1e-8 * vec_norm(r),
                "sequence vector {i} escapes the basis: {}",
                vec_norm(&resid) / vec_norm(r)
            );
        }
    }

    #[test]
    fn soar_mode_equals_zero_second_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let n = 12;
        let p = random_problem(&mut rng, n);
        let tr = build_transform(&p, TransformMode::Direct, c(0.0, 0.0)).unwrap();
        let u1 = random_vec(&mut rng, n);
        let mut a = GsoarDecomposition::start_soar(&u1).unwrap();
        let mut b = GsoarDecomposition::start(&u1, &vec![c(0.0, 0.0); n]).unwrap();
        a.extend(&tr, 5).unwrap();
        b.extend(&tr, 5).unwrap();
        for i in 0..=5 {
            let qa = a.q_col(i);
            let qb = b.q_col(i);
            for (x, y) in qa.iter().zip(qb) {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn deflation_then_breakdown_on_degenerate_operator() {
        // A = I, B = 0 (via M = I, C = -I, K = 0 in direct mode, so that
        // A = -M^{-1}C = I): r_1 = q_1 deflates, and the following step
        // breaks down because s = 0.
        let n = 5;
        let m = SparseMatrix::identity(n);
        let k = SparseMatrix::from_triplets(n, n, &[]).unwrap();
        let cm = {
            let trips: Vec<(usize, usize, Complex64)> =
                (0..n).map(|i| (i, i, c(-1.0, 0.0))).collect();
            SparseMatrix::from_triplets(n, n, &trips).unwrap()
        };
        let p = QepProblem::new(m, cm, k).unwrap();
        let tr = build_transform(&p, TransformMode::Direct, c(0.0, 0.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let u1 = random_vec(&mut rng, n);
        let mut d = GsoarDecomposition::start_soar(&u1).unwrap();

        d.extend(&tr, 1).unwrap();
        assert_eq!(d.deflated(), &[1]);
        let t = d.t_hat();
        assert_eq!(t.get(1, 0), c(1.0, 0.0));
        assert!(vec_norm(d.q_col(1)) == 0.0);
        // Stacked relation still holds after the deflated step.
        let (top, bottom, _) = d.relation_defects(&tr);
        assert!(top < 1e-12 && bottom < 1e-12);

        match d.extend(&tr, 2) {
            Err(Error::Breakdown { step: 2 }) => {}
            other => panic!("expected breakdown at step 2, got {other:?}"),
        }
    }

    #[test]
    fn reorthogonalization_keeps_basis_orthonormal() {
        // A stiff problem that stresses Gram-Schmidt: clustered operator.
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let n = 40;
        let p = random_problem(&mut rng, n);
        let tr = build_transform(&p, TransformMode::ShiftInvert, c(2.9, 0.0)).unwrap();
        let mut d =
            GsoarDecomposition::start(&random_vec(&mut rng, n), &random_vec(&mut rng, n)).unwrap();
        d.extend(&tr, 20).unwrap();
        let (_, _, orth) = d.relation_defects(&tr);
        assert!(orth < 1e-12, "orthonormality defect {orth}");
    }
}
