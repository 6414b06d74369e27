//! Cyclic Jacobi eigensolver for small complex Hermitian matrices.

use num_complex::Complex64;

use super::matrix::{CMatrix, Hermitian};
use crate::error::{Error, Result};

/// Sweeps stop once the off-diagonal Frobenius mass drops below this fraction of `||M||_2`.
pub const JACOBI_REL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

/// Ascending eigenvalues with matching orthonormal eigenvectors (as columns).
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(f(lambda)) V^dag` for a complex-valued spectral function.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.dim();
        let v = &self.vectors;
        let fl: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum()
        })
    }

    /// `V diag(f(lambda)) V^dag` for a real spectral function; Hermitian by construction.
    pub fn apply_real(&self, f: impl Fn(f64) -> f64) -> Hermitian {
        Hermitian::from_hermitian_unchecked(self.apply(|l| Complex64::new(f(l), 0.0)))
    }

    pub fn reconstruct(&self) -> Hermitian {
        self.apply_real(|l| l)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Hermitian eigendecomposition.
///
/// Deterministic for a fixed input: rotations run in fixed (p, q) order, ties
/// in the eigenvalue sort keep their diagonal order, and every eigenvector is
/// rephased so its largest-magnitude component is real and positive.
pub fn eigh(m: &Hermitian) -> Result<Spectrum> {
    let n = m.dim();
    let mut a = m.as_matrix().clone();
    let mut v = CMatrix::identity(n);
    let tol = JACOBI_REL_TOL * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > tol {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    fix_phases(&mut vectors);
    Ok(Spectrum { values, vectors })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
///
/// The 2x2 block is first made real by the phase `diag(1, e^{-i theta})`, then
/// zeroed by the classical real rotation; the product `J` is applied as
/// `A <- J^dag A J`, `V <- V J`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase_conj = (apq / g).conj();

    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = phase_conj * (-s);
    let jqq = phase_conj * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, p)] = Complex64::new(app - t * g, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * g, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

fn fix_phases(vectors: &mut CMatrix) {
    let n = vectors.rows();
    for k in 0..n {
        let max = (0..n).map(|i| vectors[(i, k)].norm()).fold(0.0, f64::max);
        if max == 0.0 {
            continue;
        }
        // first component within roundoff of the maximum, so near-ties resolve by index
        let pivot = (0..n)
            .find(|&i| vectors[(i, k)].norm() >= max * (1.0 - 1e-12))
            .unwrap_or(0);
        let z = vectors[(pivot, k)];
        let rot = z.conj() / z.norm();
        for i in 0..n {
            vectors[(i, k)] *= rot;
        }
        vectors[(pivot, k)] = Complex64::new(vectors[(pivot, k)].norm(), 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    #[test]
    fn identity_spectrum() {
        let s = eigh(&Hermitian::identity(2)).unwrap();
        assert_eq!(s.values, vec![1.0, 1.0]);
        assert_eq!(s.vectors, CMatrix::identity(2));
    }

    #[test]
    fn pauli_x_spectrum() {
        let s = eigh(&pauli::sigma_x()).unwrap();
        assert!((s.values[0] + 1.0).abs() < 1e-15);
        assert!((s.values[1] - 1.0).abs() < 1e-15);
        assert!(s.reconstruct().distance(&pauli::sigma_x()) < 1e-14);
    }

    #[test]
    fn bloch_state_spectrum() {
        // rho = (I + 0.6 sigma_x)/2 has eigenvalues (1 -+ 0.6)/2
        let rho = Hermitian::new(CMatrix::from_fn(2, 2, |i, j| {
            Complex64::new(if i == j { 0.5 } else { 0.3 }, 0.0)
        }))
        .unwrap();
        let s = eigh(&rho).unwrap();
        assert!((s.values[0] - 0.2).abs() < 1e-15);
        assert!((s.values[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn phase_convention_largest_component_real_positive() {
        let s = eigh(&pauli::sigma_y()).unwrap();
        for k in 0..2 {
            let col: Vec<_> = (0..2).map(|i| s.vectors[(i, k)]).collect();
            let pivot = if col[0].norm() >= col[1].norm() * (1.0 - 1e-12) { 0 } else { 1 };
            assert!(col[pivot].im == 0.0 && col[pivot].re > 0.0);
        }
    }

    #[test]
    fn zero_matrix() {
        let s = eigh(&Hermitian::zeros(3)).unwrap();
        assert_eq!(s.values, vec![0.0; 3]);
    }
}
