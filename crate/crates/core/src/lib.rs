//! Phase-space calculus for ensembles of N identical D-level systems.
//!
//! The library works on the affine chart z of complex projective space,
//! carrying both an exact rational pipeline (used by the identity checks)
//! and a floating pipeline (used for grids and limits). It provides
//! coherent and parity-adapted cat states, Laplacian eigen-kernels and
//! orthonormal harmonic bases, multipole operator bases, s-ordered
//! quasi-probability representations with reconstruction, kernel
//! smoothing between orderings, star and bracket operations, and named
//! verification suites shared by the test harness and the CLI.

pub mod combinatorics;
pub mod geometry;
pub mod harmonic;
pub mod poly;
pub mod scalar;
pub mod states;
pub mod sw;
pub mod verify;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("invariant-measure integral diverges: {0}")]
    DivergentIntegral(String),
    #[error("expansion order must be 1, 2, or 3 (got {0})")]
    UnsupportedOrder(u32),
    #[error("gram matrix is singular at level {level}, function {index}")]
    GramSingular { level: u32, index: usize },
    #[error("degenerate cat sector: {0}")]
    DegenerateCat(String),
    #[error("distribution carries no symbolic level data")]
    MissingSymbolicForm,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
