//! Error type shared across the solver.

/// Errors reported by the dense kernels, sparse factorizations, and the
/// restarted solver itself.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A Householder reflector was requested for a vector with zero norm.
    #[error("cannot build a reflector from a zero vector")]
    ZeroVector,

    /// The QR eigenvalue iteration failed to deflate within its sweep budget.
    #[error("eigenvalue iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    /// A matrix passed to a kernel has incompatible or unsupported dimensions.
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    /// LU elimination hit a pivot below the relative tolerance.
    #[error("singular pivot at elimination step {step}")]
    SingularPivot { step: usize },

    /// The projected mass matrix is numerically singular, so the projected
    /// quadratic problem cannot be reduced to a linear one.
    #[error("projected mass matrix is numerically singular (condition estimate {cond_estimate:.3e})")]
    SingularMassMatrix { cond_estimate: f64 },

    /// A spectral back-map was requested for mu = 0, which corresponds to an
    /// infinite eigenvalue of the original problem.
    #[error("cannot map mu = 0 back to a finite eigenvalue")]
    ZeroMu,

    /// Both starting vectors are zero (or the single starting vector in
    /// second-order Arnoldi mode).
    #[error("starting vector(s) for the Arnoldi process are zero")]
    ZeroStart,

    /// The generalized second-order Krylov space is exhausted: the candidate
    /// continuation pair is linearly dependent on what was already produced.
    #[error("second-order Arnoldi breakdown at step {step}")]
    Breakdown { step: usize },

    /// The coordinate vectors of the kept approximate eigenpairs are not
    /// numerically independent, so no complement basis exists.
    #[error("kept coordinate vectors are rank deficient (rank {rank} of {cols})")]
    RankDeficient { rank: usize, cols: usize },

    /// The residual row vanished, so no restored decomposition exists; the
    /// current subspace is (numerically) invariant.
    #[error("residual row is numerically zero; subspace is invariant")]
    ZeroResidualRow,

    /// Truncation without restoration was requested with more shifts than the
    /// castoff dimension allows.
    #[error("cannot truncate to {keep} columns after {shifts} shifts without restoration")]
    InvalidTruncation { keep: usize, shifts: usize },

    /// A matrix file could not be parsed.
    #[error("matrix file error: {0}")]
    MatrixFile(String),

    /// A solver configuration violates its invariants.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
