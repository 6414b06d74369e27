//! Dense complex linear algebra at small dimension.

mod eigh;
mod functions;
mod matrix;
pub mod quadrature;

pub use eigh::{eigh, Spectrum, JACOBI_REL_TOL};
pub use functions::{
    inverse_spectral, matrix_power_integral, matrix_power_spectral, matrix_sqrt_spectral,
    psd_spectrum, solve, unitary_exp, unitary_from_spectrum, MIN_QUAD_NODES, PSD_TOL, ZERO_FLOOR,
};
pub use matrix::{CMatrix, Hermitian, HERMITICITY_TOL};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `AB - BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    a.check_same_shape(b)?;
    Ok(&(a * b) - &(b * a))
}

/// Hilbert-Schmidt inner product `Tr(A^dag B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    a.check_same_shape(b)?;
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Schatten 2-norm `sqrt(Tr(A^dag A))`.
pub fn schatten2_norm(a: &CMatrix) -> f64 {
    a.frobenius_norm()
}

/// `||U^dag U - I||_2`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    (&u.adjoint() * u).distance(&CMatrix::identity(u.rows()))
}

pub mod pauli {
    //! Pauli matrices.
    use super::{CMatrix, Hermitian};
    use num_complex::Complex64;

    fn from(entries: [[(f64, f64); 2]; 2]) -> Hermitian {
        Hermitian::from_hermitian_unchecked(CMatrix::from_fn(2, 2, |i, j| {
            let (re, im) = entries[i][j];
            Complex64::new(re, im)
        }))
    }

    pub fn sigma_x() -> Hermitian {
        from([[(0., 0.), (1., 0.)], [(1., 0.), (0., 0.)]])
    }

    pub fn sigma_y() -> Hermitian {
        from([[(0., 0.), (0., -1.)], [(0., 1.), (0., 0.)]])
    }

    pub fn sigma_z() -> Hermitian {
        from([[(1., 0.), (0., 0.)], [(0., 0.), (-1., 0.)]])
    }

    /// `v . sigma` for a real 3-vector.
    pub fn dot(v: [f64; 3]) -> Hermitian {
        Hermitian::from_hermitian_unchecked(CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(v[2], 0.0),
            (1, 1) => Complex64::new(-v[2], 0.0),
            (0, 1) => Complex64::new(v[0], -v[1]),
            _ => Complex64::new(v[0], v[1]),
        }))
    }
}
