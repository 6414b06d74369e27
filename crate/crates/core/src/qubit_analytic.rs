//! Closed-form single-qubit machinery: averaged-axis unitaries, Bloch-vector
//! evolution, the Rodrigues rotation and analytic Hellinger angle and skew
//! information.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::coherence::wysi_from_sqrt;
use crate::dynamics::{bound_check, BoundConfig, BoundPoint, BoundReport, UnitaryFamily};
use crate::error::{Error, Result};
use crate::linalg::quadrature::gauss_legendre;
use crate::linalg::{commutator, pauli, schatten2_norm, unitary_exp, CMatrix, Hermitian};
use crate::states::{
    cross3, dot3, from_bloch, norm3, qubit_sqrt_closed, scale3, BlochVector,
    QubitSqrtCoefficients,
};

/// Unit-norm tolerance for axis directions.
pub const UNIT_TOL: f64 = 1e-12;
/// Adaptive quadrature stops once successive estimates differ by less than this.
pub const SIGMA_QUAD_TOL: f64 = 1e-10;
/// Default starting node count for the averaged axis.
pub const SIGMA_QUAD_NODES: usize = 16;
const SIGMA_QUAD_MAX_NODES: usize = 4096;
/// Tolerance of the self-commutation spot check.
pub const SELF_COMMUTATION_TOL: f64 = 1e-8;
/// Closed-form vs numeric agreement required by the worked example.
pub const WORKED_EXAMPLE_TOL: f64 = 1e-8;
/// Allowed drift of the skew information along the worked example.
pub const WYSI_CONSTANCY_TOL: f64 = 1e-11;

pub type Mat3 = [[f64; 3]; 3];

/// `K_phi = varpi (alpha I + n_phi . sigma)`.
#[derive(Clone)]
pub struct AxisFamily {
    n_hat: Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>,
    constant: Option<[f64; 3]>,
    varpi: f64,
    alpha: f64,
}

impl AxisFamily {
    pub fn new(
        n_hat: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static,
        varpi: f64,
        alpha: f64,
    ) -> Result<Self> {
        check_strengths(varpi, alpha)?;
        let fam = Self {
            n_hat: Arc::new(n_hat),
            constant: None,
            varpi,
            alpha,
        };
        fam.n_hat(0.0)?;
        Ok(fam)
    }

    pub fn constant(n: [f64; 3], varpi: f64, alpha: f64) -> Result<Self> {
        check_strengths(varpi, alpha)?;
        check_unit(n)?;
        Ok(Self {
            n_hat: Arc::new(move |_| n),
            constant: Some(n),
            varpi,
            alpha,
        })
    }

    /// `n_phi = (cos(rate phi), sin(rate phi), 0)`.
    pub fn rotating_xy(rate: f64, varpi: f64, alpha: f64) -> Result<Self> {
        Self::new(
            move |p| [(rate * p).cos(), (rate * p).sin(), 0.0],
            varpi,
            alpha,
        )
    }

    pub fn varpi(&self) -> f64 {
        self.varpi
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn constant_axis(&self) -> Option<[f64; 3]> {
        self.constant
    }

    /// `n_phi`, checked to be a unit vector.
    pub fn n_hat(&self, phi: f64) -> Result<[f64; 3]> {
        let n = (self.n_hat)(phi);
        check_unit(n)?;
        Ok(n)
    }

    /// `varpi (alpha I + n_phi . sigma)`.
    pub fn generator(&self, phi: f64) -> Result<Hermitian> {
        let n = self.n_hat(phi)?;
        Ok(Hermitian::identity(2)
            .scale(self.alpha)
            .add(&pauli::dot(n))
            .scale(self.varpi))
    }

    /// Largest `||[K_a, K_b]||_2` over all pairs of the sample points.
    pub fn self_commutation_defect(&self, samples: &[f64]) -> Result<f64> {
        let ks = samples
            .iter()
            .map(|&p| self.generator(p))
            .collect::<Result<Vec<_>>>()?;
        let mut worst = 0.0f64;
        for (i, a) in ks.iter().enumerate() {
            for b in &ks[i + 1..] {
                worst = worst.max(schatten2_norm(&commutator(a, b)?));
            }
        }
        Ok(worst)
    }

    /// Whether the generators at the sample points commute within tolerance.
    pub fn is_self_commuting(&self, samples: &[f64]) -> Result<bool> {
        Ok(self.self_commutation_defect(samples)? <= SELF_COMMUTATION_TOL)
    }
}

impl fmt::Debug for AxisFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AxisFamily")
            .field("constant", &self.constant)
            .field("varpi", &self.varpi)
            .field("alpha", &self.alpha)
            .finish()
    }
}

fn check_strengths(varpi: f64, alpha: f64) -> Result<()> {
    if !(varpi > 0.0 && varpi.is_finite()) {
        return Err(Error::InvalidArgument(format!("varpi must be positive, got {varpi}")));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be non-negative, got {alpha}")));
    }
    Ok(())
}

fn check_unit(n: [f64; 3]) -> Result<()> {
    let len = norm3(n);
    if !((len - 1.0).abs() <= UNIT_TOL) {
        return Err(Error::InvalidArgument(format!("axis must be a unit vector, |n| = {len}")));
    }
    Ok(())
}

/// Averaged axis and rotation angles at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationState {
    /// `(1/phi) int_0^phi n_phi' dphi'`.
    pub sigma_avg: [f64; 3],
    /// `varpi phi |Sigma| / hbar`.
    pub gamma: f64,
    /// `varpi phi / hbar`.
    pub delta: f64,
}

impl RotationState {
    pub fn sigma_hat(&self) -> Option<[f64; 3]> {
        let n = norm3(self.sigma_avg);
        (n > 0.0).then(|| scale3(self.sigma_avg, 1.0 / n))
    }
}

/// Averaged axis by Gauss-Legendre quadrature, doubling the node count from
/// `n_quad` until successive estimates agree.
pub fn sigma_average(axis: &AxisFamily, phi: f64, hbar: f64, n_quad: usize) -> Result<RotationState> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
    }
    let delta = axis.varpi * phi / hbar;
    let sigma_avg = if let Some(n) = axis.constant {
        n
    } else if phi == 0.0 {
        axis.n_hat(0.0)?
    } else {
        adaptive_average(axis, phi, n_quad.max(2))?
    };
    let len = norm3(sigma_avg);
    if len > 1.0 + 1e-10 {
        return Err(Error::Quadrature(format!("averaged axis has length {len} > 1")));
    }
    Ok(RotationState {
        sigma_avg,
        gamma: delta * len,
        delta,
    })
}

fn adaptive_average(axis: &AxisFamily, phi: f64, start: usize) -> Result<[f64; 3]> {
    let rule = |n: usize| -> Result<[f64; 3]> {
        let (x, w) = gauss_legendre(n);
        let mut acc = [0.0; 3];
        for (xi, wi) in x.iter().zip(&w) {
            let v = axis.n_hat(0.5 * phi * (xi + 1.0))?;
            for k in 0..3 {
                acc[k] += 0.5 * wi * v[k];
            }
        }
        Ok(acc)
    };
    let mut n = start;
    let mut prev = rule(n)?;
    while n < SIGMA_QUAD_MAX_NODES {
        n *= 2;
        let next = rule(n)?;
        let diff = norm3([next[0] - prev[0], next[1] - prev[1], next[2] - prev[2]]);
        if diff < SIGMA_QUAD_TOL {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!(
        "averaged axis did not converge with {SIGMA_QUAD_MAX_NODES} nodes at phi = {phi}"
    )))
}

/// `U_phi = e^{-i delta alpha} [I cos gamma - i (Sigma_hat . sigma) sin gamma]`.
pub fn unitary_closed(axis: &AxisFamily, phi: f64, hbar: f64) -> Result<CMatrix> {
    let st = sigma_average(axis, phi, hbar, SIGMA_QUAD_NODES)?;
    let phase = Complex64::from_polar(1.0, -st.delta * axis.alpha);
    let mut u = CMatrix::identity(2).scale_real(st.gamma.cos());
    if let Some(s) = st.sigma_hat() {
        u = &u + &pauli::dot(s).as_matrix().scale(Complex64::new(0.0, -st.gamma.sin()));
    }
    Ok(u.scale(phase))
}

/// `cos 2g r + (1 - cos 2g)(s . r) s + sin 2g (s x r)`.
pub fn bloch_rotate(r0: [f64; 3], sigma_hat: [f64; 3], gamma: f64) -> [f64; 3] {
    let (c, s) = ((2.0 * gamma).cos(), (2.0 * gamma).sin());
    let proj = (1.0 - c) * dot3(sigma_hat, r0);
    let cr = cross3(sigma_hat, r0);
    std::array::from_fn(|k| c * r0[k] + proj * sigma_hat[k] + s * cr[k])
}

/// Bloch vector of `U_phi rho_0 U_phi^dag` from the closed-form rotation.
pub fn bloch_evolve_closed(
    r0: BlochVector,
    axis: &AxisFamily,
    phi: f64,
    hbar: f64,
) -> Result<BlochVector> {
    let st = sigma_average(axis, phi, hbar, SIGMA_QUAD_NODES)?;
    let r = match st.sigma_hat() {
        Some(s) => bloch_rotate(r0.components(), s, st.gamma),
        None => r0.components(),
    };
    BlochVector::new(r)
}

/// `Lambda_jl = eps_jkl s_k`, so that `Lambda r = s x r`.
pub fn lambda_matrix(sigma_hat: [f64; 3]) -> Mat3 {
    let [x, y, z] = sigma_hat;
    [[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]]
}

/// Adjoint-representation generators `(J_k)_jl = -i eps_kjl`.
pub fn adjoint_generators() -> [CMatrix; 3] {
    std::array::from_fn(|k| {
        CMatrix::from_fn(3, 3, |j, l| Complex64::new(0.0, -levi_civita(k, j, l)))
    })
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `S = I + (1 - cos 2g) Lambda^2 + sin 2g Lambda`.
pub fn rodrigues_matrix(sigma_hat: [f64; 3], gamma: f64) -> Result<Mat3> {
    check_unit(sigma_hat)?;
    let l = lambda_matrix(sigma_hat);
    let l2 = mat3_mul(&l, &l);
    let (c, s) = ((2.0 * gamma).cos(), (2.0 * gamma).sin());
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id + (1.0 - c) * l2[i][j] + s * l[i][j]
        })
    }))
}

/// `e^{2 g Lambda}` computed as `exp(-2 i g (s . J))` through the spectrum of
/// the Hermitian matrix `s . J`.
pub fn rotation_exp(sigma_hat: [f64; 3], gamma: f64) -> Result<Mat3> {
    check_unit(sigma_hat)?;
    let j = adjoint_generators();
    let sj = CMatrix::from_fn(3, 3, |a, b| {
        (0..3).map(|k| j[k][(a, b)] * sigma_hat[k]).sum::<Complex64>()
    });
    let u = unitary_exp(&Hermitian::new(sj)?, 2.0 * gamma)?;
    let imag = u.as_slice().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > 1e-12 {
        return Err(Error::CrossCheck(format!("rotation has imaginary part {imag:e}")));
    }
    Ok(std::array::from_fn(|a| std::array::from_fn(|b| u[(a, b)].re)))
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

pub fn mat3_apply(a: &Mat3, v: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| dot3(a[i], v))
}

/// `cos L = (1/4)[c0+ cphi+ + c0- cphi- (r_hat_phi . r_hat_0)]`; valid for unequal radii.
pub fn cos_hellinger_qubit(r0: BlochVector, r_phi: BlochVector) -> f64 {
    let a = QubitSqrtCoefficients::from_radius(r0.norm());
    let b = QubitSqrtCoefficients::from_radius(r_phi.norm());
    let overlap = match (r0.direction(), r_phi.direction()) {
        (Some(u), Some(v)) => dot3(u, v),
        _ => 0.0,
    };
    0.25 * (a.c_plus * b.c_plus + a.c_minus * b.c_minus * overlap)
}

/// Equal-radius form `(1/2)[xi+ + xi- cos theta]` with `cos theta = r_hat_phi . r_hat_0`.
pub fn cos_hellinger_equal_radius(radius: f64, cos_theta: f64) -> f64 {
    let c = QubitSqrtCoefficients::from_radius(radius);
    0.5 * (c.xi_plus + c.xi_minus * cos_theta)
}

/// `I = (1/2)(varpi c-)^2 |r_hat x n_hat|^2`.
pub fn wysi_qubit_closed(r_phi: BlochVector, n_hat: [f64; 3], varpi: f64) -> Result<f64> {
    check_unit(n_hat)?;
    let Some(r_hat) = r_phi.direction() else {
        return Ok(0.0);
    };
    let c = QubitSqrtCoefficients::from_radius(r_phi.norm());
    let cr = cross3(r_hat, n_hat);
    Ok(0.5 * (varpi * c.c_minus).powi(2) * dot3(cr, cr))
}

/// Parameters of the single-qubit worked example: constant axis, initial Bloch
/// vector perpendicular to it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorkedExample {
    pub r0_mag: f64,
    /// Angle of `r_0` in the plane perpendicular to the axis.
    pub azimuth: f64,
    pub varpi: f64,
    pub alpha: f64,
    pub hbar: f64,
    pub axis: [f64; 3],
}

impl Default for WorkedExample {
    fn default() -> Self {
        Self {
            r0_mag: 0.6,
            azimuth: 0.0,
            varpi: 1.0,
            alpha: 0.0,
            hbar: 1.0,
            axis: [0.0, 0.0, 1.0],
        }
    }
}

impl WorkedExample {
    /// Normalizes the axis and checks `0 < r0_mag < 1`.
    pub fn validated(mut self) -> Result<Self> {
        if !(self.r0_mag > 0.0 && self.r0_mag < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "r0 must lie in (0, 1), got {}",
                self.r0_mag
            )));
        }
        let len = norm3(self.axis);
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::InvalidArgument("axis must be non-zero".into()));
        }
        self.axis = scale3(self.axis, 1.0 / len);
        check_strengths(self.varpi, self.alpha)?;
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {}", self.hbar)));
        }
        Ok(self)
    }

    /// `r_0 = r0_mag (cos a e1 + sin a e2)` with `(e1, e2, axis)` right-handed.
    /// For the z axis `e1 = x`, `e2 = y`.
    pub fn initial_bloch(&self) -> Result<BlochVector> {
        let (e1, e2) = perpendicular_frame(self.axis);
        let (c, s) = (self.azimuth.cos(), self.azimuth.sin());
        BlochVector::new(std::array::from_fn(|k| self.r0_mag * (c * e1[k] + s * e2[k])))
    }

    pub fn axis_family(&self) -> Result<AxisFamily> {
        AxisFamily::constant(self.axis, self.varpi, self.alpha)
    }

    /// One grid point from the closed forms alone.
    pub fn closed_point(&self, phi: f64) -> Result<BoundPoint> {
        let r0 = self.initial_bloch()?;
        let rate = self.varpi / self.hbar;
        let r_phi = BlochVector::new(bloch_rotate(r0.components(), self.axis, rate * phi))?;
        let c = QubitSqrtCoefficients::from_radius(self.r0_mag);
        let cos = cos_hellinger_qubit(r0, r_phi);
        let wysi = wysi_qubit_closed(r_phi, self.axis, self.varpi)?;
        let lhs = c.xi_minus * rate * (2.0 * rate * phi).sin().abs();
        let rhs = SQRT_2 / self.hbar * wysi.sqrt();
        Ok(BoundPoint {
            phi,
            lhs,
            lhs_analytic: lhs,
            rhs,
            margin: rhs - lhs,
            wysi,
            cos_hellinger: cos,
            fd_error: 0.0,
            tolerance: 0.0,
            non_smooth: false,
            violated: rhs < lhs,
        })
    }
}

fn perpendicular_frame(axis: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    // Gram-Schmidt on the coordinate vector least aligned with the axis;
    // for the z axis this yields (x, y).
    let k = (0..3)
        .min_by(|&a, &b| axis[a].abs().total_cmp(&axis[b].abs()))
        .unwrap_or(0);
    let mut e: [f64; 3] = [0.0; 3];
    e[k] = 1.0;
    let along = dot3(e, axis);
    let e1 = std::array::from_fn(|i| e[i] - along * axis[i]);
    let e1 = scale3(e1, 1.0 / norm3(e1));
    let e2 = cross3(axis, e1);
    (e1, e2)
}

/// The worked example built entirely from closed forms, with every column
/// cross-validated against [`bound_check`] and the skew information checked
/// to be a constant of motion.
pub fn worked_example(params: &WorkedExample, phi_grid: &[f64]) -> Result<BoundReport> {
    let params = params.validated()?;
    let points = phi_grid
        .iter()
        .map(|&phi| params.closed_point(phi))
        .collect::<Result<Vec<_>>>()?;
    let closed = BoundReport { points };

    let family = UnitaryFamily::axis(params.axis_family()?, params.hbar)?;
    let rho0 = from_bloch(params.initial_bloch()?);
    let cfg = BoundConfig::default()
        .with_hbar(params.hbar)
        .with_grid(phi_grid.to_vec());
    let numeric = bound_check(&rho0, &family, &cfg)?;

    for (c, n) in closed.points.iter().zip(&numeric.points) {
        let columns = [
            ("lhs", c.lhs, n.lhs),
            ("rhs", c.rhs, n.rhs),
            ("margin", c.margin, n.margin),
            ("wysi", c.wysi, n.wysi),
            ("cos_hellinger", c.cos_hellinger, n.cos_hellinger),
        ];
        for (name, a, b) in columns {
            if !((a - b).abs() <= WORKED_EXAMPLE_TOL) {
                return Err(Error::CrossCheck(format!(
                    "{name} at phi = {}: closed form {a} vs numeric {b}",
                    c.phi
                )));
            }
        }
    }

    let expected = params.varpi.powi(2) * QubitSqrtCoefficients::from_radius(params.r0_mag).xi_minus;
    for p in closed.points.iter().chain(&numeric.points) {
        if !((p.wysi - expected).abs() <= WYSI_CONSTANCY_TOL) {
            return Err(Error::CrossCheck(format!(
                "skew information {} at phi = {} differs from the constant {expected}",
                p.wysi, p.phi
            )));
        }
    }

    let mut report = closed;
    for (c, n) in report.points.iter_mut().zip(&numeric.points) {
        c.fd_error = n.fd_error;
        c.tolerance = n.tolerance;
        c.violated = c.margin < -n.tolerance;
    }
    Ok(report)
}

/// `Tr` based skew information of the closed-form square root, used to tie
/// the closed form to the generic commutator expression.
pub fn wysi_from_closed_sqrt(r: BlochVector, k: &Hermitian) -> Result<f64> {
    wysi_from_sqrt(&qubit_sqrt_closed(r), k)
}
