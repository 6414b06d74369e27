//! Density matrices, Bloch vectors, closed-form qubit algebra and random ensembles.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    self, eigh, matrix_power_spectral, matrix_sqrt_spectral, pauli, CMatrix, Hermitian, PSD_TOL,
};

/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Slack allowed on `|r| <= 1`.
pub const BLOCH_NORM_SLACK: f64 = 1e-12;
/// Closed-form inverse is refused at or beyond this Bloch radius.
pub const SINGULAR_RADIUS: f64 = 1.0 - 1e-8;

/// Unit-trace positive semidefinite Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: Hermitian,
}

impl DensityMatrix {
    pub fn new(matrix: Hermitian) -> Result<Self> {
        let tr = matrix.trace_re();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let min = eigh(&matrix)?.min();
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { matrix })
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(Hermitian::new(m)?)
    }

    /// Skips validation; for matrices that are states by construction.
    pub(crate) fn from_valid(matrix: Hermitian) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_valid(Hermitian::identity(dim).scale(1.0 / dim as f64))
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(Hermitian::from_real_diagonal(probabilities))
    }

    /// `|psi><psi|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() || !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument(
                "pure state needs a nonzero finite vector".into(),
            ));
        }
        let n = amplitudes.len();
        let psi: Vec<Complex64> = amplitudes.iter().map(|z| z / norm).collect();
        Ok(Self::from_valid(Hermitian::from_hermitian_unchecked(
            CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj()),
        )))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn as_hermitian(&self) -> &Hermitian {
        &self.matrix
    }

    pub fn as_matrix(&self) -> &CMatrix {
        self.matrix.as_matrix()
    }

    pub fn sqrt(&self) -> Result<Hermitian> {
        matrix_sqrt_spectral(&self.matrix)
    }

    pub fn power(&self, p: f64) -> Result<Hermitian> {
        matrix_power_spectral(&self.matrix, p)
    }

    /// `U rho U^dag`; the caller guarantees `U` is unitary.
    pub fn conjugate_by(&self, u: &CMatrix) -> DensityMatrix {
        Self::from_valid(self.matrix.conjugate_by(u))
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }

    pub fn check_dim(&self, other_dim: usize) -> Result<()> {
        if self.dim() != other_dim {
            return Err(Error::DimensionMismatch {
                left: (self.dim(), self.dim()),
                right: (other_dim, other_dim),
            });
        }
        Ok(())
    }
}

/// Real 3-vector with `|r| <= 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub fn new(r: [f64; 3]) -> Result<Self> {
        let n = norm3(r);
        if !n.is_finite() || n > 1.0 + BLOCH_NORM_SLACK {
            return Err(Error::InvalidBloch(n));
        }
        Ok(Self(r))
    }

    pub fn origin() -> Self {
        Self([0.0; 3])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm3(self.0)
    }

    /// Direction `r / |r|`; `None` at the origin.
    pub fn direction(&self) -> Option<[f64; 3]> {
        let n = self.norm();
        (n > 0.0).then(|| scale3(self.0, 1.0 / n))
    }
}

/// Coefficients of the closed-form qubit square root.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitSqrtCoefficients {
    pub c_plus: f64,
    pub c_minus: f64,
    pub xi_plus: f64,
    pub xi_minus: f64,
}

impl QubitSqrtCoefficients {
    /// `c_pm = sqrt(1 + r) pm sqrt(1 - r)`, `xi_pm = 1 pm sqrt(1 - r^2)`.
    pub fn from_radius(r: f64) -> Self {
        let r = r.clamp(0.0, 1.0);
        let a = (1.0 + r).sqrt();
        let b = (1.0 - r).sqrt();
        let s = (1.0 - r * r).sqrt();
        Self {
            c_plus: a + b,
            c_minus: a - b,
            xi_plus: 1.0 + s,
            xi_minus: 1.0 - s,
        }
    }
}

/// `rho = (I + r . sigma) / 2`.
pub fn from_bloch(r: BlochVector) -> DensityMatrix {
    let m = pauli::dot(r.0);
    let half = Hermitian::identity(2).add(&m).scale(0.5);
    DensityMatrix::from_valid(half)
}

/// `r_k = Tr(rho sigma_k)`.
pub fn to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::NotQubit(rho.dim()));
    }
    let m = rho.as_matrix();
    let r = [
        2.0 * m[(0, 1)].re,
        -2.0 * m[(0, 1)].im,
        (m[(0, 0)] - m[(1, 1)]).re,
    ];
    BlochVector::new(r)
}

/// `sqrt(rho) = [c_+ I + c_- (r_hat . sigma)] / (2 sqrt 2)`.
pub fn qubit_sqrt_closed(r: BlochVector) -> Hermitian {
    let c = QubitSqrtCoefficients::from_radius(r.norm());
    let k = 1.0 / (2.0 * std::f64::consts::SQRT_2);
    let id = Hermitian::identity(2).scale(c.c_plus * k);
    match r.direction() {
        Some(n) => id.add(&pauli::dot(n).scale(c.c_minus * k)),
        None => id,
    }
}

/// `rho^{-1} = 2 (I - r . sigma) / (1 - |r|^2)`.
pub fn qubit_inverse_closed(r: BlochVector) -> Result<Hermitian> {
    let n = r.norm();
    if n >= SINGULAR_RADIUS {
        return Err(Error::Singular((1.0 - n * n) / 4.0));
    }
    let scale = 2.0 / (1.0 - n * n);
    Ok(Hermitian::identity(2).sub(&pauli::dot(r.0)).scale(scale))
}

/// `det rho = (1 - |r|^2) / 4`.
pub fn qubit_det_closed(r: BlochVector) -> f64 {
    let n2 = r.0.iter().map(|x| x * x).sum::<f64>();
    (1.0 - n2) / 4.0
}

/// `Tr rho^2`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = rho.as_matrix();
    m.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// Deterministic generator for a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent per-index seed from a master seed (splitmix64 finalizer).
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(seed ^ splitmix(index))
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `G G^dag / Tr(G G^dag)` with `G` a `dim x rank` complex Gaussian matrix.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(&mut rng_from_seed(seed), dim, rank)
}

pub fn random_density_with<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::InvalidArgument(format!(
            "rank must satisfy 1 <= rank <= dim, got rank {rank} for dim {dim}"
        )));
    }
    let g = CMatrix::from_fn(dim, rank, |_, _| complex_gaussian(rng));
    let ggd = &g * &g.adjoint();
    let tr = ggd.trace().re;
    Ok(DensityMatrix::from_valid(Hermitian::from_hermitian_unchecked(
        ggd.scale_real(1.0 / tr),
    )))
}

/// `scale * (G + G^dag) / 2` with complex Gaussian `G`.
pub fn random_hermitian(dim: usize, seed: u64, scale: f64) -> Hermitian {
    random_hermitian_with(&mut rng_from_seed(seed), dim, scale)
}

pub fn random_hermitian_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> Hermitian {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    Hermitian::from_hermitian_unchecked((&g + &g.adjoint()).scale_real(0.5 * scale))
}

/// Haar-random unitary: Gram-Schmidt on a complex Gaussian matrix, columns
/// rephased so the construction matches QR with a positive-diagonal R.
pub fn random_unitary_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| (0..dim).map(|_| complex_gaussian(rng)).collect())
        .collect();
    for k in 0..dim {
        for j in 0..k {
            let proj: Complex64 = (0..dim).map(|i| cols[j][i].conj() * cols[k][i]).sum();
            let (head, tail) = cols.split_at_mut(k);
            for (z, v) in tail[0].iter_mut().zip(&head[j]) {
                *z -= proj * v;
            }
        }
        let n = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut cols[k] {
            *z /= n;
        }
    }
    CMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

/// Bloch vector with uniform direction and radius uniform in `[0, max_radius]`.
pub fn random_bloch_with<R: Rng + ?Sized>(rng: &mut R, max_radius: f64) -> BlochVector {
    let dir = random_unit_vector_with(rng);
    let r = rng.random::<f64>() * max_radius.min(1.0);
    BlochVector(scale3(dir, r))
}

pub fn random_unit_vector_with<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = norm3(v);
        if n > 1e-8 {
            return scale3(v, 1.0 / n);
        }
    }
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn scale3(v: [f64; 3], s: f64) -> [f64; 3] {
    [v[0] * s, v[1] * s, v[2] * s]
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Convenience for tests and callers: validated `rho` from an explicit matrix of reals.
pub fn density_from_real(rows: &[&[f64]]) -> Result<DensityMatrix> {
    let n = rows.len();
    let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0));
    DensityMatrix::from_matrix(m)
}

/// Product of eigenvalues.
pub fn determinant(rho: &DensityMatrix) -> Result<f64> {
    Ok(linalg::eigh(rho.as_hermitian())?.values.iter().product())
}
