//! Unitary parameter encoding and the skew-information speed bound
//!
//! `|d/dphi cos L(rho_0, rho_phi)| <= (sqrt 2 / hbar) sqrt(I(rho_phi, K_phi))`,
//!
//! together with each intermediate step of its derivation so they can be
//! checked separately: the square-root flow, the Cauchy-Schwarz estimate, the
//! commutator-norm identity and the pure-state reduction.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::coherence::{variance, wysi_from_sqrt};
use crate::error::{Error, Result};
use crate::linalg::{
    commutator, eigh, hs_inner, schatten2_norm, unitarity_defect, unitary_from_spectrum, CMatrix,
    Hermitian, Spectrum,
};
use crate::qubit_analytic::{unitary_closed, AxisFamily};
use crate::states::{purity, DensityMatrix};

/// Unitarity tolerance for evaluated families.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Generators whose anti-Hermitian residual exceeds this are rejected.
pub const GENERATOR_ASYMMETRY_TOL: f64 = 1e-6;
/// Fixed part of the violation tolerance; the finite-difference error estimate is added on top.
pub const VIOLATION_BASE_TOL: f64 = 1e-8;
/// Multiplier on the finite-difference error estimate in the violation tolerance.
pub const FD_ERROR_FACTOR: f64 = 10.0;
/// Grid points whose finite-difference error estimate exceeds this are flagged non-smooth.
pub const NON_SMOOTH_FD_ERROR: f64 = 1e-5;
/// Purity tolerance for the pure-state reduction.
pub const PURE_TOL: f64 = 1e-10;

#[derive(Clone)]
enum FamilyKind {
    ConstantGenerator {
        generator: Hermitian,
        hbar: f64,
        spectrum: Spectrum,
    },
    Axis {
        axis: AxisFamily,
        hbar: f64,
    },
    Function(Arc<dyn Fn(f64) -> CMatrix + Send + Sync>),
}

/// A continuous map `phi -> U_phi` with `U_0 = I`.
#[derive(Clone)]
pub struct UnitaryFamily {
    dim: usize,
    kind: FamilyKind,
}

impl UnitaryFamily {
    /// `U_phi = exp(-i phi K / hbar)`.
    pub fn constant_generator(generator: Hermitian, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        let spectrum = eigh(&generator)?;
        Ok(Self {
            dim: generator.dim(),
            kind: FamilyKind::ConstantGenerator {
                generator,
                hbar,
                spectrum,
            },
        })
    }

    /// Single-qubit family driven by `K_phi = varpi (alpha I + n_phi . sigma)`.
    pub fn axis(axis: AxisFamily, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        Ok(Self {
            dim: 2,
            kind: FamilyKind::Axis { axis, hbar },
        })
    }

    /// Arbitrary family given as a closure; `U_0` must be the identity.
    pub fn from_fn(dim: usize, f: impl Fn(f64) -> CMatrix + Send + Sync + 'static) -> Result<Self> {
        let u0 = f(0.0);
        if u0.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch {
                left: (dim, dim),
                right: u0.shape(),
            });
        }
        let defect = u0.distance(&CMatrix::identity(dim));
        if defect > UNITARITY_TOL {
            return Err(Error::InvalidArgument(format!(
                "family must satisfy U(0) = I (defect {defect:e})"
            )));
        }
        Ok(Self {
            dim,
            kind: FamilyKind::Function(Arc::new(f)),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind_label(&self) -> &'static str {
        match self.kind {
            FamilyKind::ConstantGenerator { .. } => "constant-generator",
            FamilyKind::Axis { .. } => "axis-family",
            FamilyKind::Function(_) => "function",
        }
    }

    /// The generator for constant-generator families.
    pub fn constant(&self) -> Option<&Hermitian> {
        match &self.kind {
            FamilyKind::ConstantGenerator { generator, .. } => Some(generator),
            _ => None,
        }
    }

    /// `K_phi` when it is known exactly: constant generators and constant-axis
    /// qubit families. Other families go through [`generator`].
    pub fn known_generator(&self, phi: f64) -> Option<Result<Hermitian>> {
        match &self.kind {
            FamilyKind::ConstantGenerator { generator, .. } => Some(Ok(generator.clone())),
            FamilyKind::Axis { axis, .. } if axis.constant_axis().is_some() => {
                Some(axis.generator(phi))
            }
            _ => None,
        }
    }

    /// `U_phi`, checked for unitarity.
    pub fn evaluate(&self, phi: f64) -> Result<CMatrix> {
        let u = match &self.kind {
            FamilyKind::ConstantGenerator { spectrum, hbar, .. } => {
                return Ok(unitary_from_spectrum(spectrum, phi / hbar));
            }
            FamilyKind::Axis { axis, hbar } => unitary_closed(axis, phi, *hbar)?,
            FamilyKind::Function(f) => f(phi),
        };
        if u.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch {
                left: (self.dim, self.dim),
                right: u.shape(),
            });
        }
        let defect = unitarity_defect(&u);
        if !(defect <= UNITARITY_TOL) {
            return Err(Error::NotUnitary(defect));
        }
        Ok(u)
    }
}

impl fmt::Debug for UnitaryFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnitaryFamily")
            .field("dim", &self.dim)
            .field("kind", &self.kind_label())
            .finish()
    }
}

fn check_hbar(hbar: f64) -> Result<()> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
    }
    Ok(())
}

/// `phi -> exp(-i phi K / hbar)`.
pub fn exp_family(k: &Hermitian, hbar: f64) -> Result<UnitaryFamily> {
    UnitaryFamily::constant_generator(k.clone(), hbar)
}

/// Numerical settings shared by the bound machinery.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundConfig {
    pub hbar: f64,
    pub fd_step: f64,
    pub phi_grid: Vec<f64>,
}

impl Default for BoundConfig {
    /// `hbar = 1`, `fd_step = 1e-5`, 201 uniform points on `[0, 2 pi]`.
    fn default() -> Self {
        Self {
            hbar: 1.0,
            fd_step: 1e-5,
            phi_grid: uniform_grid(0.0, 2.0 * PI, 201),
        }
    }
}

impl BoundConfig {
    pub fn with_grid(mut self, phi_grid: Vec<f64>) -> Self {
        self.phi_grid = phi_grid;
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_hbar(self.hbar)?;
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "fd_step must be positive, got {}",
                self.fd_step
            )));
        }
        if self.phi_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("phi grid must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// `steps` evenly spaced points from `min` to `max` inclusive.
pub fn uniform_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![min],
        _ => (0..steps)
            .map(|i| {
                if i == steps - 1 {
                    max
                } else {
                    min + (max - min) * i as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}

/// A derivative estimate with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

/// Central difference with one Richardson level: `(4 D(h/2) - D(h)) / 3`.
///
/// The error estimate is the gap between the extrapolated value and the finer
/// central difference plus a roundoff floor of `10 eps |f| / h`.
pub fn richardson(f: impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<Derivative> {
    let (fp, fm) = (f(x + h)?, f(x - h)?);
    let (fp2, fm2) = (f(x + 0.5 * h)?, f(x - 0.5 * h)?);
    let coarse = (fp - fm) / (2.0 * h);
    let fine = (fp2 - fm2) / h;
    let value = (4.0 * fine - coarse) / 3.0;
    let scale = fp.abs().max(fm.abs()).max(1.0);
    let error = (value - fine).abs() + 10.0 * f64::EPSILON * scale / h;
    Ok(Derivative { value, error })
}

/// Matrix-valued Richardson derivative.
fn richardson_matrix(f: impl Fn(f64) -> Result<CMatrix>, x: f64, h: f64) -> Result<CMatrix> {
    let coarse = (&f(x + h)? - &f(x - h)?).scale_real(0.5 / h);
    let fine = (&f(x + 0.5 * h)? - &f(x - 0.5 * h)?).scale_real(1.0 / h);
    Ok((&fine.scale_real(4.0) - &coarse).scale_real(1.0 / 3.0))
}

/// `K_phi` estimated from the family, with its anti-Hermitian residual.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorEstimate {
    pub generator: Hermitian,
    /// `||K - K^dag||_2 / max(1, ||K||_2)` before symmetrization.
    pub asymmetry: f64,
}

/// `K_phi = -i hbar U_phi dU_phi^dag / dphi`, by central differences, symmetrized.
pub fn generator(family: &UnitaryFamily, phi: f64, h: f64, hbar: f64) -> Result<GeneratorEstimate> {
    check_hbar(hbar)?;
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let u = family.evaluate(phi)?;
    let du_dag = richardson_matrix(|p| Ok(family.evaluate(p)?.adjoint()), phi, h)?;
    let raw = (&u * &du_dag).scale(Complex64::new(0.0, -hbar));
    let asymmetry = raw.hermitian_residual() / raw.frobenius_norm().max(1.0);
    if asymmetry > GENERATOR_ASYMMETRY_TOL {
        return Err(Error::CrossCheck(format!(
            "generator at phi = {phi} is not Hermitian (residual {asymmetry:e}); family is non-smooth or non-unitary"
        )));
    }
    Ok(GeneratorEstimate {
        generator: Hermitian::from_hermitian_unchecked(raw),
        asymmetry,
    })
}

/// `rho_phi = U_phi rho_0 U_phi^dag`.
pub fn evolve(rho0: &DensityMatrix, family: &UnitaryFamily, phi: f64) -> Result<DensityMatrix> {
    rho0.check_dim(family.dim())?;
    Ok(rho0.conjugate_by(&family.evaluate(phi)?))
}

/// Precomputed data for one probe state along one family.
struct Trajectory<'a> {
    rho0: &'a DensityMatrix,
    sqrt_rho0: Hermitian,
    family: &'a UnitaryFamily,
    cfg: &'a BoundConfig,
}

/// Everything known at one parameter value.
struct Slice {
    sqrt_rho: Hermitian,
    generator: Hermitian,
}

impl<'a> Trajectory<'a> {
    fn new(rho0: &'a DensityMatrix, family: &'a UnitaryFamily, cfg: &'a BoundConfig) -> Result<Self> {
        cfg.validate()?;
        rho0.check_dim(family.dim())?;
        Ok(Self {
            rho0,
            sqrt_rho0: rho0.sqrt()?,
            family,
            cfg,
        })
    }

    fn sqrt_at(&self, phi: f64) -> Result<Hermitian> {
        evolve(self.rho0, self.family, phi)?.sqrt()
    }

    /// Unclamped `Tr(sqrt(rho_0) sqrt(rho_phi))`, smooth in phi.
    fn cos_hellinger_raw(&self, phi: f64) -> Result<f64> {
        let sqrt_rho = self.sqrt_at(phi)?;
        Ok(hs_inner(&self.sqrt_rho0, &sqrt_rho)?.re)
    }

    fn slice(&self, phi: f64) -> Result<Slice> {
        Ok(Slice {
            sqrt_rho: self.sqrt_at(phi)?,
            generator: match self.family.known_generator(phi) {
                Some(k) => k?,
                None => generator(self.family, phi, self.cfg.fd_step, self.cfg.hbar)?.generator,
            },
        })
    }

    /// `Tr(sqrt(rho_0) [K_phi, sqrt(rho_phi)])`, purely imaginary.
    fn overlap_commutator(&self, s: &Slice) -> Result<Complex64> {
        let c = commutator(&s.generator, &s.sqrt_rho)?;
        hs_inner(&self.sqrt_rho0, &c)
    }

    fn derivative_pair(&self, phi: f64, s: &Slice) -> Result<DerivativePair> {
        let numeric = richardson(|p| self.cos_hellinger_raw(p), phi, self.cfg.fd_step)?;
        // d/dphi Tr(sqrt(rho_0) sqrt(rho_phi)) = -(i/hbar) Tr(sqrt(rho_0) [K, sqrt(rho_phi)])
        let analytic = (self.overlap_commutator(s)? * Complex64::new(0.0, -1.0 / self.cfg.hbar)).re;
        Ok(DerivativePair {
            numeric: numeric.value,
            analytic,
            fd_error: numeric.error,
        })
    }
}

/// Signed derivative of `cos L(rho_0, rho_phi)` by finite differences and by the flow formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativePair {
    pub numeric: f64,
    pub analytic: f64,
    pub fd_error: f64,
}

impl DerivativePair {
    pub fn tolerance(&self) -> f64 {
        (1e-6f64).max(1e-4 * self.analytic.abs().max(self.numeric.abs()))
    }

    pub fn agree(&self) -> bool {
        (self.numeric - self.analytic).abs() <= self.tolerance()
    }

    fn non_smooth(&self) -> bool {
        self.fd_error > NON_SMOOTH_FD_ERROR
    }
}

/// Both estimates of `d cos L / dphi`; fails if they disagree beyond
/// `max(1e-6, 1e-4 |value|)`.
pub fn cos_hellinger_derivative(
    rho0: &DensityMatrix,
    family: &UnitaryFamily,
    phi: f64,
    cfg: &BoundConfig,
) -> Result<DerivativePair> {
    let t = Trajectory::new(rho0, family, cfg)?;
    let s = t.slice(phi)?;
    let pair = t.derivative_pair(phi, &s)?;
    if !pair.agree() {
        return Err(derivative_mismatch(phi, &pair));
    }
    Ok(pair)
}

fn derivative_mismatch(phi: f64, pair: &DerivativePair) -> Error {
    Error::CrossCheck(format!(
        "d cos L/dphi at phi = {phi}: finite difference {} vs flow formula {} (tolerance {:e})",
        pair.numeric,
        pair.analytic,
        pair.tolerance()
    ))
}

/// Both sides of `|Tr(sqrt(rho_0)[K, sqrt(rho_phi)])| <= ||sqrt(rho_0)||_2 ||[K, sqrt(rho_phi)]||_2`.
pub fn cauchy_schwarz_gap(
    rho0: &DensityMatrix,
    family: &UnitaryFamily,
    phi: f64,
    cfg: &BoundConfig,
) -> Result<(f64, f64)> {
    let t = Trajectory::new(rho0, family, cfg)?;
    let s = t.slice(phi)?;
    let lhs = t.overlap_commutator(&s)?.norm();
    let c = commutator(&s.generator, &s.sqrt_rho)?;
    let rhs = schatten2_norm(&t.sqrt_rho0) * schatten2_norm(&c);
    Ok((lhs, rhs))
}

/// `(||[K, sqrt(rho)]||_2, sqrt(2 I(rho, K)))`, which coincide.
pub fn commutator_norm_identity(rho: &DensityMatrix, k: &Hermitian) -> Result<(f64, f64)> {
    rho.check_dim(k.dim())?;
    let sqrt_rho = rho.sqrt()?;
    let norm = schatten2_norm(&commutator(k, &sqrt_rho)?);
    let skew = wysi_from_sqrt(&sqrt_rho, k)?;
    Ok((norm, (2.0 * skew).sqrt()))
}

/// One grid point of a bound check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundPoint {
    pub phi: f64,
    /// `|d/dphi cos L(rho_0, rho_phi)|` by finite differences.
    pub lhs: f64,
    /// `(1/hbar) |Tr(sqrt(rho_0)[K_phi, sqrt(rho_phi)])|`.
    pub lhs_analytic: f64,
    /// `(sqrt 2 / hbar) sqrt(I(rho_phi, K_phi))`.
    pub rhs: f64,
    pub margin: f64,
    pub wysi: f64,
    pub cos_hellinger: f64,
    pub fd_error: f64,
    pub tolerance: f64,
    pub non_smooth: bool,
    pub violated: bool,
}

/// Per-grid-point record of the speed bound.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundReport {
    pub points: Vec<BoundPoint>,
}

impl BoundReport {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn violations(&self) -> usize {
        self.points.iter().filter(|p| p.violated).count()
    }

    pub fn min_margin(&self) -> f64 {
        self.points.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min)
    }

    /// Grid point with the smallest margin.
    pub fn worst(&self) -> Option<&BoundPoint> {
        self.points.iter().min_by(|a, b| a.margin.total_cmp(&b.margin))
    }
}

/// Evaluates both sides of the bound on every grid point.
///
/// The left side is a Richardson finite difference of `cos L`, cross-checked
/// against the flow formula; a disagreement is an error unless the point is
/// flagged non-smooth. A point counts as violated when
/// `margin < -(1e-8 + 10 * fd_error)`. Grid points are processed in parallel
/// and reassembled in grid order.
pub fn bound_check(
    rho0: &DensityMatrix,
    family: &UnitaryFamily,
    cfg: &BoundConfig,
) -> Result<BoundReport> {
    let t = Trajectory::new(rho0, family, cfg)?;
    let points = cfg
        .phi_grid
        .par_iter()
        .map(|&phi| bound_point(&t, phi))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport { points })
}

fn bound_point(t: &Trajectory<'_>, phi: f64) -> Result<BoundPoint> {
    let hbar = t.cfg.hbar;
    let s = t.slice(phi)?;
    let pair = t.derivative_pair(phi, &s)?;
    let non_smooth = pair.non_smooth();
    if !non_smooth && !pair.agree() {
        return Err(derivative_mismatch(phi, &pair));
    }
    let skew = wysi_from_sqrt(&s.sqrt_rho, &s.generator)?;
    let rhs = SQRT_2 / hbar * skew.sqrt();
    let lhs = pair.numeric.abs();
    let margin = rhs - lhs;
    let tolerance = VIOLATION_BASE_TOL + FD_ERROR_FACTOR * pair.fd_error;
    let cos = hs_inner(&t.sqrt_rho0, &s.sqrt_rho)?.re.clamp(0.0, 1.0);
    Ok(BoundPoint {
        phi,
        lhs,
        lhs_analytic: pair.analytic.abs(),
        rhs,
        margin,
        wysi: skew,
        cos_hellinger: cos,
        fd_error: pair.fd_error,
        tolerance,
        non_smooth,
        violated: !non_smooth && margin < -tolerance,
    })
}

/// `f(phi) = Tr(rho_0 rho_phi) / Tr(rho_0^2)`.
pub fn relative_purity(rho0: &DensityMatrix, rho_phi: &DensityMatrix) -> Result<f64> {
    rho0.check_dim(rho_phi.dim())?;
    Ok(hs_inner(rho0.as_matrix(), rho_phi.as_matrix())?.re / purity(rho0))
}

/// Pure-state reduction at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureStateBound {
    /// `Delta K_phi = sqrt(Var(K_phi))` in the evolved state.
    pub delta_k: f64,
    /// `(hbar / sqrt 2) |df/dphi|`.
    pub rhs: f64,
    pub wysi: f64,
    pub fd_error: f64,
}

impl PureStateBound {
    pub fn holds(&self) -> bool {
        self.delta_k >= self.rhs - 1e-8
    }
}

/// `Delta K_phi >= (hbar / sqrt 2) |d f / dphi|` for a pure probe, plus the
/// saturation check `I(rho_phi, K_phi) = Delta K_phi^2`.
pub fn pure_state_bound(
    psi0: &DensityMatrix,
    family: &UnitaryFamily,
    phi: f64,
    cfg: &BoundConfig,
) -> Result<PureStateBound> {
    let p = purity(psi0);
    if (p - 1.0).abs() > PURE_TOL {
        return Err(Error::InvalidArgument(format!(
            "pure-state reduction needs purity 1, got {p}"
        )));
    }
    let t = Trajectory::new(psi0, family, cfg)?;
    let s = t.slice(phi)?;
    let rho_phi = evolve(psi0, family, phi)?;
    let var = variance(&rho_phi, &s.generator)?;
    let skew = wysi_from_sqrt(&s.sqrt_rho, &s.generator)?;
    if (skew - var).abs() > 1e-10 * var.max(1.0) {
        return Err(Error::CrossCheck(format!(
            "pure state does not saturate: skew information {skew} vs variance {var}"
        )));
    }
    let df = richardson(
        |q| relative_purity(psi0, &evolve(psi0, family, q)?),
        phi,
        cfg.fd_step,
    )?;
    Ok(PureStateBound {
        delta_k: var.sqrt(),
        rhs: cfg.hbar / SQRT_2 * df.value.abs(),
        wysi: skew,
        fd_error: df.error,
    })
}

/// `||d sqrt(rho_phi)/dphi + (i/hbar)[K_phi, sqrt(rho_phi)]||_2`, failing when it
/// exceeds `max(1e-6, 1e-4 ||[K_phi, sqrt(rho_phi)]||_2)`.
pub fn sqrt_flow_residual(
    rho0: &DensityMatrix,
    family: &UnitaryFamily,
    phi: f64,
    cfg: &BoundConfig,
) -> Result<f64> {
    let t = Trajectory::new(rho0, family, cfg)?;
    let s = t.slice(phi)?;
    let deriv = richardson_matrix(|p| Ok(t.sqrt_at(p)?.into_matrix()), phi, cfg.fd_step)?;
    let c = commutator(&s.generator, &s.sqrt_rho)?;
    let flow = c.scale(Complex64::new(0.0, 1.0 / cfg.hbar));
    let residual = schatten2_norm(&(&deriv + &flow));
    let bound = (1e-6f64).max(1e-4 * schatten2_norm(&c));
    if residual > bound {
        return Err(Error::CrossCheck(format!(
            "square-root flow residual {residual:e} exceeds {bound:e} at phi = {phi}"
        )));
    }
    Ok(residual)
}
