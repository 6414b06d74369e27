//! Matrix functions: square roots, fractional powers, exponentials, inverses.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::eigh::{eigh, Spectrum};
use super::matrix::{CMatrix, Hermitian};
use super::quadrature::gauss_legendre;
use crate::error::{Error, Result};

/// Eigenvalues in `[-PSD_TOL, 0)` are roundoff; anything more negative is an invalid state.
pub const PSD_TOL: f64 = 1e-10;

/// Eigenvalues at or below `ZERO_FLOOR * max(1, lambda_max)` are treated as exact zeros
/// by the spectral functions. Jacobi returns the kernel of a rank-deficient matrix as
/// eigenvalues of size ~1e-16, whose square roots (~1e-8) would otherwise leak into
/// `sqrt(rho)`.
pub const ZERO_FLOOR: f64 = 1e-13;

/// Minimum node count for the integral representation.
pub const MIN_QUAD_NODES: usize = 16;

/// Spectrum of a positive semidefinite matrix with roundoff eigenvalues set to zero.
pub fn psd_spectrum(m: &Hermitian) -> Result<Spectrum> {
    let mut spec = eigh(m)?;
    let min = spec.min();
    if min < -PSD_TOL {
        return Err(Error::NotPsd(min));
    }
    let floor = ZERO_FLOOR * spec.max().max(1.0);
    for l in &mut spec.values {
        if *l <= floor {
            *l = 0.0;
        }
    }
    Ok(spec)
}

/// Principal square root of a PSD matrix through its eigendecomposition.
pub fn matrix_sqrt_spectral(m: &Hermitian) -> Result<Hermitian> {
    Ok(psd_spectrum(m)?.apply_real(f64::sqrt))
}

/// `M^p` for PSD `M` and `p > 0`, with `0^p = 0`.
pub fn matrix_power_spectral(m: &Hermitian, p: f64) -> Result<Hermitian> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "matrix power exponent must be positive, got {p}"
        )));
    }
    Ok(psd_spectrum(m)?.apply_real(|l| if l == 0.0 { 0.0 } else { l.powf(p) }))
}

/// Inverse of a Hermitian matrix through its eigendecomposition.
pub fn inverse_spectral(m: &Hermitian) -> Result<Hermitian> {
    let spec = eigh(m)?;
    let smallest = spec
        .values
        .iter()
        .copied()
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    if smallest.abs() <= PSD_TOL * spec.max().abs().max(1.0) {
        return Err(Error::Singular(smallest));
    }
    Ok(spec.apply_real(|l| 1.0 / l))
}

/// `exp(-i t H)`.
pub fn unitary_exp(h: &Hermitian, t: f64) -> Result<CMatrix> {
    Ok(unitary_from_spectrum(&eigh(h)?, t))
}

/// `exp(-i t H)` from a precomputed spectrum of `H`.
pub fn unitary_from_spectrum(spec: &Spectrum, t: f64) -> CMatrix {
    spec.apply(|l| Complex64::from_polar(1.0, -t * l))
}

/// `Lambda^s` from the resolvent integral
/// `Lambda^s = sin(pi s)/(pi s) * int_0^inf Lambda (Lambda + x I)^{-1} s x^{s-1} dx`.
///
/// The half-line is split at `x = 1`. On `(0, 1]` the substitution `y = x^s`
/// absorbs the `x^{s-1}` singularity; on `[1, inf)` the substitution
/// `x = 1/z`, `z = w^{1/(1-s)}` does the same for the tail. Each piece uses an
/// `n_quad`-point Gauss-Legendre rule and every node costs one linear solve, so
/// the result never touches an eigendecomposition.
pub fn matrix_power_integral(m: &Hermitian, s: f64, n_quad: usize) -> Result<Hermitian> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "integral representation needs s in (0, 1), got {s}"
        )));
    }
    if n_quad < MIN_QUAD_NODES {
        return Err(Error::InvalidArgument(format!(
            "n_quad must be at least {MIN_QUAD_NODES}, got {n_quad}"
        )));
    }
    // The representation needs a non-singular operator.
    let min = eigh(m)?.min();
    if min <= PSD_TOL {
        return Err(Error::Singular(min));
    }

    let n = m.dim();
    let lam = m.as_matrix();
    let id = CMatrix::identity(n);
    let (nodes, weights) = gauss_legendre(n_quad);
    let mut acc = CMatrix::zeros(n, n);

    for (&xi, &wi) in nodes.iter().zip(&weights) {
        let u = 0.5 * (xi + 1.0);
        let w = 0.5 * wi;

        // (0, 1]: Lambda (Lambda + y^{1/s} I)^{-1} dy
        let x = u.powf(1.0 / s);
        let shifted = lam + &id.scale_real(x);
        let term = solve(&shifted, lam)?;
        acc = &acc + &term.scale_real(w);

        // [1, inf): s/(1-s) * Lambda (z Lambda + I)^{-1} dw
        let z = u.powf(1.0 / (1.0 - s));
        let shifted = &lam.scale_real(z) + &id;
        let term = solve(&shifted, lam)?;
        acc = &acc + &term.scale_real(w * s / (1.0 - s));
    }

    let prefactor = (PI * s).sin() / (PI * s);
    Ok(Hermitian::from_hermitian_unchecked(acc.scale_real(prefactor)))
}

/// Solves `A X = B` by LU decomposition with partial pivoting.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    let n = a.rows();
    let m = b.cols();
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| lu[(i, col)].norm().total_cmp(&lu[(j, col)].norm()))
            .unwrap_or(col);
        let p = lu[(pivot, col)];
        if p.norm() <= 1e-15 * scale {
            return Err(Error::Singular(p.norm()));
        }
        if pivot != col {
            for k in 0..n {
                let tmp = lu[(col, k)];
                lu[(col, k)] = lu[(pivot, k)];
                lu[(pivot, k)] = tmp;
            }
            for k in 0..m {
                let tmp = x[(col, k)];
                x[(col, k)] = x[(pivot, k)];
                x[(pivot, k)] = tmp;
            }
        }
        for row in (col + 1)..n {
            let factor = lu[(row, col)] / p;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = lu[(col, k)];
                lu[(row, k)] -= factor * v;
            }
            for k in 0..m {
                let v = x[(col, k)];
                x[(row, k)] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let p = lu[(col, col)];
        for k in 0..m {
            let mut v = x[(col, k)];
            for j in (col + 1)..n {
                v -= lu[(col, j)] * x[(j, k)];
            }
            x[(col, k)] = v / p;
        }
    }
    Ok(x)
}
