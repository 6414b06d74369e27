//! Skew-information coherence quantifiers and the monotone metric they come from.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{commutator, psd_spectrum, CMatrix, Hermitian, Spectrum};
use crate::states::DensityMatrix;

/// Tangent vectors with `|Tr A|` above this are rejected rather than projected.
pub const TRACELESS_TOL: f64 = 1e-8;
/// Tolerance for projector idempotence and completeness.
pub const PROJECTOR_TOL: f64 = 1e-10;
/// Off-diagonal magnitude below which a state counts as diagonal.
pub const INCOHERENCE_TOL: f64 = 1e-10;
/// Outcomes with probability at or below this are dropped from measurement averages.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-14;

/// Wigner-Yanase skew information `-1/2 Tr([sqrt(rho), K]^2)`.
pub fn wysi(rho: &DensityMatrix, k: &Hermitian) -> Result<f64> {
    rho.check_dim(k.dim())?;
    wysi_from_sqrt(&rho.sqrt()?, k)
}

/// Skew information from a precomputed `sqrt(rho)`.
pub fn wysi_from_sqrt(sqrt_rho: &Hermitian, k: &Hermitian) -> Result<f64> {
    let c = commutator(sqrt_rho, k)?;
    let tr = (&c * &c).trace().re;
    Ok((-0.5 * tr).max(0.0))
}

/// Wigner-Yanase-Dyson skew information `-1/2 Tr([rho^p, K][rho^{1-p}, K])`.
pub fn wydsi(rho: &DensityMatrix, k: &Hermitian, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "skew exponent must lie in (0, 1), got {p}"
        )));
    }
    rho.check_dim(k.dim())?;
    let spec = psd_spectrum(rho.as_hermitian())?;
    let pow = |e: f64| spec.apply_real(move |l| if l == 0.0 { 0.0 } else { l.powf(e) });
    let a = commutator(&pow(p), k)?;
    let b = commutator(&pow(1.0 - p), k)?;
    Ok(-0.5 * (&a * &b).trace().re)
}

/// `<K^2> - <K>^2`.
pub fn variance(rho: &DensityMatrix, k: &Hermitian) -> Result<f64> {
    rho.check_dim(k.dim())?;
    let rk = rho.as_matrix() * k.as_matrix();
    let mean = rk.trace().re;
    let second = (&rk * k.as_matrix()).trace().re;
    Ok((second - mean * mean).max(0.0))
}

/// An operator monotone function used to index a monotone metric.
#[derive(Clone)]
pub struct PetzFunction {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    label: String,
}

impl PetzFunction {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            label: label.into(),
        }
    }

    /// `f(t) = (sqrt(t) + 1)^2 / 4`, the function behind the skew information.
    pub fn wigner_yanase() -> Self {
        Self::new("wigner-yanase", |t: f64| 0.25 * (t.sqrt() + 1.0).powi(2))
    }

    /// `f(t) = (1 + t)/2`, the smallest monotone metric.
    pub fn bures() -> Self {
        Self::new("bures", |t: f64| 0.5 * (1.0 + t))
    }

    /// `f(t) = 2t/(1 + t)`, the largest monotone metric.
    pub fn harmonic() -> Self {
        Self::new("harmonic", |t: f64| 2.0 * t / (1.0 + t))
    }

    /// `f(t) = (t - 1)/ln t`.
    pub fn kubo_mori() -> Self {
        Self::new("kubo-mori", |t: f64| {
            if (t - 1.0).abs() < 1e-8 {
                // series about t = 1
                let u = t - 1.0;
                1.0 + u / 2.0 - u * u / 12.0
            } else {
                (t - 1.0) / t.ln()
            }
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    /// Spot-checks monotonicity, `f(t) = t f(1/t)` and `f(1) = 1` on a log grid.
    pub fn check_axioms(&self) -> Result<()> {
        let fail = |what: &str| {
            Err(Error::InvalidArgument(format!(
                "{} fails the {what} condition",
                self.label
            )))
        };
        if (self.eval(1.0) - 1.0).abs() > 1e-12 {
            return fail("normalization");
        }
        let grid: Vec<f64> = (-40..=40).map(|k| 10f64.powf(k as f64 / 10.0)).collect();
        for w in grid.windows(2) {
            if self.eval(w[0]) > self.eval(w[1]) + 1e-15 {
                return fail("monotonicity");
            }
        }
        for &t in &grid {
            let lhs = self.eval(t);
            let rhs = t * self.eval(1.0 / t);
            if (lhs - rhs).abs() > 1e-12 * lhs.abs().max(1.0) {
                return fail("self-inversion");
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PetzFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PetzFunction").field("label", &self.label).finish()
    }
}

/// Morozova-Chentsov kernel `c_f(x, y) = 1 / (y f(x/y))`.
pub fn cencov_kernel(f: &PetzFunction, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "kernel arguments must be positive, got ({x}, {y})"
        )));
    }
    Ok(1.0 / (y * f.eval(x / y)))
}

/// Monotone metric `g_f(A, B) = Tr[A c_f(L, R) B]` evaluated in the eigenbasis of rho.
///
/// Tangent vectors must be (numerically) traceless; a small trace is projected out.
pub fn petz_metric(
    rho: &DensityMatrix,
    a: &Hermitian,
    b: &Hermitian,
    f: &PetzFunction,
) -> Result<f64> {
    rho.check_dim(a.dim())?;
    rho.check_dim(b.dim())?;
    let a = traceless(a)?;
    let b = traceless(b)?;
    let spec = psd_spectrum(rho.as_hermitian())?;
    let at = to_eigenbasis(&spec, &a);
    let bt = to_eigenbasis(&spec, &b);
    let n = rho.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (li, lj) = (spec.values[i], spec.values[j]);
            let weight = at[(i, j)].conj() * bt[(i, j)];
            if li == 0.0 && lj == 0.0 {
                if at[(i, j)].norm() > 1e-10 || bt[(i, j)].norm() > 1e-10 {
                    return Err(Error::InvalidArgument(
                        "tangent vector has support on the kernel of rho".into(),
                    ));
                }
                continue;
            }
            let c = 1.0 / (lj.max(li) * kernel_ratio(f, li, lj));
            if !c.is_finite() {
                if weight.norm() > 1e-10 {
                    return Err(Error::InvalidArgument(format!(
                        "metric kernel of {} diverges at eigenvalue pair ({li}, {lj})",
                        f.label()
                    )));
                }
                continue;
            }
            acc += weight * c;
        }
    }
    Ok(acc.re)
}

/// `y f(x/y) / max(x, y)` written so one zero argument stays finite:
/// kernel symmetry lets us always divide by the larger eigenvalue.
fn kernel_ratio(f: &PetzFunction, x: f64, y: f64) -> f64 {
    if y >= x {
        f.eval(x / y)
    } else {
        // y f(x/y) = x f(y/x) by self-inversion
        f.eval(y / x)
    }
}

fn traceless(a: &Hermitian) -> Result<Hermitian> {
    let tr = a.trace_re();
    if tr.abs() >= TRACELESS_TOL {
        return Err(Error::InvalidArgument(format!(
            "tangent vector must be traceless, got trace {tr:e}"
        )));
    }
    if tr == 0.0 {
        return Ok(a.clone());
    }
    Ok(a.sub(&Hermitian::identity(a.dim()).scale(tr / a.dim() as f64)))
}

fn to_eigenbasis(spec: &Spectrum, a: &CMatrix) -> CMatrix {
    &(&spec.vectors.adjoint() * a) * &spec.vectors
}

/// The tangent vector `i[rho, K]` generated by an observable.
pub fn tangent(rho: &DensityMatrix, k: &Hermitian) -> Result<Hermitian> {
    let c = commutator(rho.as_matrix(), k)?;
    Ok(Hermitian::from_hermitian_unchecked(
        c.scale(Complex64::new(0.0, 1.0)),
    ))
}

/// A complete set of orthogonal projectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveMeasurement {
    projectors: Vec<Hermitian>,
}

impl ProjectiveMeasurement {
    pub fn new(projectors: Vec<Hermitian>) -> Result<Self> {
        let first = projectors
            .first()
            .ok_or_else(|| Error::InvalidArgument("measurement needs a projector".into()))?;
        let n = first.dim();
        let mut sum = CMatrix::zeros(n, n);
        for p in &projectors {
            if p.dim() != n {
                return Err(Error::DimensionMismatch {
                    left: (n, n),
                    right: p.shape(),
                });
            }
            let defect = (&**p * &**p).distance(p);
            if defect > PROJECTOR_TOL {
                return Err(Error::InvalidArgument(format!(
                    "operator is not idempotent (||P^2 - P||_2 = {defect:e})"
                )));
            }
            sum = &sum + p;
        }
        let defect = sum.distance(&CMatrix::identity(n));
        if defect > PROJECTOR_TOL {
            return Err(Error::InvalidArgument(format!(
                "projectors do not sum to identity (defect {defect:e})"
            )));
        }
        Ok(Self { projectors })
    }

    /// Rank-one projectors onto the columns of a unitary.
    pub fn from_basis(basis: &CMatrix) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::NotSquare {
                rows: basis.rows(),
                cols: basis.cols(),
            });
        }
        let n = basis.rows();
        let projectors = (0..n)
            .map(|k| {
                Hermitian::from_hermitian_unchecked(CMatrix::from_fn(n, n, |i, j| {
                    basis[(i, k)] * basis[(j, k)].conj()
                }))
            })
            .collect();
        Self::new(projectors)
    }

    pub fn computational(dim: usize) -> Self {
        Self::from_basis(&CMatrix::identity(dim)).expect("identity basis is orthonormal")
    }

    pub fn projectors(&self) -> &[Hermitian] {
        &self.projectors
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    /// True iff every projector commutes with `k` within the projector tolerance.
    /// Only then is the average skew information guaranteed not to increase.
    pub fn commutes_with(&self, k: &Hermitian) -> bool {
        self.projectors.iter().all(|p| {
            commutator(p, k).is_ok_and(|c| c.frobenius_norm() <= PROJECTOR_TOL * k.frobenius_norm().max(1.0))
        })
    }
}

/// Probability-weighted skew information of the post-measurement states,
/// `sum_mu p_mu I(P_mu rho P_mu / p_mu, K)`, together with the outcome probabilities.
pub fn measurement_average_wysi(
    rho: &DensityMatrix,
    k: &Hermitian,
    measurement: &ProjectiveMeasurement,
) -> Result<(f64, Vec<f64>)> {
    rho.check_dim(k.dim())?;
    rho.check_dim(measurement.dim())?;
    let mut avg = 0.0;
    let mut probabilities = Vec::with_capacity(measurement.projectors.len());
    for p in &measurement.projectors {
        let post = &(&**p * rho.as_matrix()) * &**p;
        let prob = post.trace().re;
        probabilities.push(prob);
        if prob <= NEGLIGIBLE_PROBABILITY {
            continue;
        }
        let state = DensityMatrix::from_valid(Hermitian::from_hermitian_unchecked(
            post.scale_real(1.0 / prob),
        ));
        avg += prob * wysi(&state, k)?;
    }
    Ok((avg, probabilities))
}

/// True iff `V^dag rho V` is diagonal to within the incoherence tolerance.
pub fn is_incoherent(rho: &DensityMatrix, basis: &CMatrix) -> bool {
    if basis.shape() != rho.as_matrix().shape() {
        return false;
    }
    let m = &(&basis.adjoint() * rho.as_matrix()) * basis;
    let n = rho.dim();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)].norm() < INCOHERENCE_TOL))
}

/// Completely dephases `rho` in the given orthonormal basis.
pub fn dephase(rho: &DensityMatrix, basis: &CMatrix) -> Result<DensityMatrix> {
    let m = ProjectiveMeasurement::from_basis(basis)?;
    let n = rho.dim();
    let mut out = CMatrix::zeros(n, n);
    for p in m.projectors() {
        out = &out + &(&(&**p * rho.as_matrix()) * &**p);
    }
    Ok(DensityMatrix::from_valid(Hermitian::from_hermitian_unchecked(out)))
}
