//! Dense Hermitian linear algebra for small composite quantum systems.
//!
//! Everything here works on full `total_dim x total_dim` complex matrices. The
//! tensor-product convention is the usual Kronecker ordering: the first factor of a
//! [`CompositeSpace`] is the most significant digit of a basis index.

mod operator;
mod propagate;
mod space;
mod state;

pub use operator::{pauli, HermitianOperator, Pauli, SpectralDecomposition};
pub use propagate::{evolve, EvolvingState, Observable, Propagator};
pub use space::{CompositeSpace, Factor};
pub(crate) use operator::embed_matrix;
pub(crate) use state::trace_of_product;
pub use state::{relative_entropy, von_neumann_entropy, DensityMatrix};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;

/// Relative Hermiticity tolerance, `max|M - M^dag| <= tol * max|M|`.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Allowed deviation of a state's trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-NEGATIVITY_TOL, 0)` are treated as rounding noise and clamped to zero.
pub const NEGATIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QdynError {
    #[error("duplicate factor label `{0}`")]
    DuplicateLabel(String),
    #[error("factor `{label}` has dimension {dim}, need at least 2")]
    FactorTooSmall { label: String, dim: usize },
    #[error("composite space needs at least one factor")]
    EmptySpace,
    #[error("unknown factor label `{0}`")]
    UnknownLabel(String),
    #[error("factor `{label}` has dimension {dim}, expected a qubit")]
    NotQubit { label: String, dim: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operands live on different spaces: {0}")]
    SpaceMismatch(String),
    #[error("matrix is not Hermitian (relative deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace deviates from one by {0:e}")]
    NotNormalized(f64),
    #[error("eigenvalue {0:e} is below the tolerated negativity")]
    NegativeEigenvalue(f64),
    #[error("empty selection of factors to keep")]
    EmptySelection,
    #[error("support of the first state is not contained in the support of the second: infinite divergence")]
    InfiniteDivergence,
    #[error("eigendecomposition did not converge")]
    EigenFailure,
    #[error("time grid must be ascending and start at t >= 0")]
    InvalidTimeGrid,
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for j in 0..n {
        for i in 0..=j {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn check_hermitian(m: &CMatrix) -> Result<(), QdynError> {
    if m.nrows() != m.ncols() {
        return Err(QdynError::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    let scale = max_abs(m);
    let dev = hermitian_deviation(m);
    if dev > HERMITICITY_TOL * scale {
        return Err(QdynError::NotHermitian(if scale > 0.0 { dev / scale } else { dev }));
    }
    Ok(())
}
