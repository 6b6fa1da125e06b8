//! Implicitly restarted generalized second-order Arnoldi (GSOAR) methods for
//! large sparse quadratic eigenvalue problems `(lambda^2 M + lambda C + K) x = 0`.
//!
//! The solver projects the problem onto a generalized second-order Krylov
//! subspace built by the GSOAR procedure, extracts Ritz or refined Ritz
//! approximations, and restarts implicitly with filtered starting data. Two
//! restart flavours are provided:
//!
//! * an all-shifts scheme that applies every candidate shift and then restores
//!   the Hessenberg structure of the swept reduction by a unitary similarity
//!   that also concentrates the accumulated residual row in its last entry, and
//! * the classical truncation scheme, which is limited to at most `m - k`
//!   shifts per restart and serves as the baseline.
//!
//! The crate is organized by pipeline stage: [`dense`] holds the small dense
//! kernels, [`sparse`]/[`mm`] the sparse storage and IO, [`problem`] the
//! quadratic pencil and its spectral transforms, [`soar`] the decomposition,
//! [`ritz`]/[`shifts`]/[`restart`] the per-cycle stages, and [`driver`] the
//! outer iteration. [`benchmarks`] generates the shipped test problems.

pub mod benchmarks;
pub mod dense;
pub mod driver;
pub mod error;
pub mod mm;
pub mod problem;
pub mod restart;
pub mod ritz;
pub mod shifts;
pub mod soar;
pub mod sparse;

pub use error::{Error, Result};
