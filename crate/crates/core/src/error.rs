use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("entry count {got} does not match shape {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, got: usize },

    #[error("matrix has a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (||M - M^dag||_2 = {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not positive semidefinite: eigenvalue {0:.3e}")]
    NotPsd(f64),

    #[error("operator is singular: smallest eigenvalue {0:.3e}")]
    Singular(f64),

    #[error("Bloch vector norm {0} exceeds 1")]
    InvalidBloch(f64),

    #[error("expected a qubit (dimension 2), got dimension {0}")]
    NotQubit(usize),

    #[error("not unitary (||U^dag U - I||_2 = {0:.3e})")]
    NotUnitary(f64),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
