//! C ABI for `wysi-core`.
//!
//! Objects are opaque heap handles created by `wysi_*_new`/`wysi_*_random`
//! style constructors and released with the matching `wysi_*_free`. Every
//! fallible call returns a [`WysiStatus`] and writes its result through an
//! out-pointer; on failure `wysi_last_error_message` describes what went wrong
//! on the calling thread. Matrices are passed as `2 * dim * dim` doubles,
//! row-major, real and imaginary parts interleaved.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use wysi_core::coherence::{variance, wydsi, wysi};
use wysi_core::dynamics::{bound_check, exp_family, uniform_grid, BoundConfig, BoundReport, UnitaryFamily};
use wysi_core::geometry::{affinity, hellinger_angle};
use wysi_core::linalg::{CMatrix, Hermitian};
use wysi_core::qubit_analytic::{worked_example, AxisFamily, WorkedExample};
use wysi_core::states::{from_bloch, random_density, random_hermitian, BlochVector, DensityMatrix};
use wysi_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WysiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotHermitian = 4,
    NotPositive = 5,
    InvalidTrace = 6,
    Singular = 7,
    NotUnitary = 8,
    CrossCheck = 9,
    NoConvergence = 10,
    Panic = 11,
}

impl From<&Error> for WysiStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } | Error::NotSquare { .. } | Error::BadShape { .. } => {
                WysiStatus::DimensionMismatch
            }
            Error::NotQubit(_) => WysiStatus::DimensionMismatch,
            Error::NotHermitian { .. } => WysiStatus::NotHermitian,
            Error::NotPsd(_) => WysiStatus::NotPositive,
            Error::InvalidTrace(_) => WysiStatus::InvalidTrace,
            Error::Singular(_) => WysiStatus::Singular,
            Error::NotUnitary(_) => WysiStatus::NotUnitary,
            Error::CrossCheck(_) => WysiStatus::CrossCheck,
            Error::NoConvergence(_) | Error::Quadrature(_) => WysiStatus::NoConvergence,
            Error::NonFinite | Error::InvalidBloch(_) | Error::InvalidArgument(_) => {
                WysiStatus::InvalidArgument
            }
        }
    }
}

/// Density matrix handle.
pub struct WysiDensity(DensityMatrix);
/// Hermitian observable handle.
pub struct WysiObservable(Hermitian);
/// Unitary family handle.
pub struct WysiFamily(UnitaryFamily);
/// Bound report handle.
pub struct WysiReport(BoundReport);

/// One grid point of a bound report.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct WysiBoundPoint {
    pub phi: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub wysi: f64,
    pub cos_hellinger: f64,
    pub fd_error: f64,
    pub violated: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn wysi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wysi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

enum Fail {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> WysiStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WysiStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_last_error(format!("null pointer passed for {what}"));
            WysiStatus::NullPointer
        }
        Ok(Err(Fail::Core(e))) => {
            set_last_error(e.to_string());
            WysiStatus::from(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            WysiStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_box<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    put(out, Box::into_raw(Box::new(value)), "out")
}

unsafe fn read_matrix(dim: usize, re_im: *const f64) -> Result<CMatrix, Fail> {
    if re_im.is_null() {
        return Err(Fail::Null("matrix entries"));
    }
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()).into());
    }
    let raw = std::slice::from_raw_parts(re_im, 2 * dim * dim);
    let data = raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
    Ok(CMatrix::from_vec(dim, dim, data)?)
}

unsafe fn free_box<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Density matrix from `2 * dim * dim` interleaved doubles; validated for
/// Hermiticity, unit trace and positivity.
///
/// # Safety
/// `re_im` must point to `2 * dim * dim` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_density_new(
    dim: usize,
    re_im: *const f64,
    out: *mut *mut WysiDensity,
) -> WysiStatus {
    guard(|| {
        let m = read_matrix(dim, re_im)?;
        put_box(out, WysiDensity(DensityMatrix::from_matrix(m)?))
    })
}

/// Qubit state `(I + r . sigma) / 2`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_density_from_bloch(
    x: f64,
    y: f64,
    z: f64,
    out: *mut *mut WysiDensity,
) -> WysiStatus {
    guard(|| {
        let r = BlochVector::new([x, y, z])?;
        put_box(out, WysiDensity(from_bloch(r)))
    })
}

/// Seeded Ginibre state of the given rank.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_density_random(
    dim: usize,
    rank: usize,
    seed: u64,
    out: *mut *mut WysiDensity,
) -> WysiStatus {
    guard(|| put_box(out, WysiDensity(random_density(dim, rank, seed)?)))
}

/// # Safety
/// `rho` must be NULL or a live handle from this library; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn wysi_density_free(rho: *mut WysiDensity) {
    free_box(rho)
}

/// Dimension of a state, or 0 for NULL.
///
/// # Safety
/// `rho` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wysi_density_dim(rho: *const WysiDensity) -> usize {
    rho.as_ref().map_or(0, |r| r.0.dim())
}

/// Hermitian observable from `2 * dim * dim` interleaved doubles.
///
/// # Safety
/// `re_im` must point to `2 * dim * dim` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_observable_new(
    dim: usize,
    re_im: *const f64,
    out: *mut *mut WysiObservable,
) -> WysiStatus {
    guard(|| {
        let m = read_matrix(dim, re_im)?;
        put_box(out, WysiObservable(Hermitian::new(m)?))
    })
}

/// Seeded `scale (G + G^dag) / 2` with complex Gaussian `G`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_observable_random(
    dim: usize,
    seed: u64,
    scale: f64,
    out: *mut *mut WysiObservable,
) -> WysiStatus {
    guard(|| {
        if dim == 0 || !scale.is_finite() {
            return Err(Error::InvalidArgument("dimension must be positive and scale finite".into()).into());
        }
        put_box(out, WysiObservable(random_hermitian(dim, seed, scale)))
    })
}

/// # Safety
/// `k` must be NULL or a live handle from this library; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn wysi_observable_free(k: *mut WysiObservable) {
    free_box(k)
}

/// `phi -> exp(-i phi K / hbar)`.
///
/// # Safety
/// `k` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_family_exp(
    k: *const WysiObservable,
    hbar: f64,
    out: *mut *mut WysiFamily,
) -> WysiStatus {
    guard(|| {
        let k = get(k, "observable")?;
        put_box(out, WysiFamily(exp_family(&k.0, hbar)?))
    })
}

/// Qubit family with `K = varpi (alpha I + n . sigma)` for a fixed unit axis `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_family_axis(
    nx: f64,
    ny: f64,
    nz: f64,
    varpi: f64,
    alpha: f64,
    hbar: f64,
    out: *mut *mut WysiFamily,
) -> WysiStatus {
    guard(|| {
        let axis = AxisFamily::constant([nx, ny, nz], varpi, alpha)?;
        put_box(out, WysiFamily(UnitaryFamily::axis(axis, hbar)?))
    })
}

/// # Safety
/// `family` must be NULL or a live handle from this library; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn wysi_family_free(family: *mut WysiFamily) {
    free_box(family)
}

/// Wigner-Yanase skew information `-(1/2) Tr([sqrt(rho), K]^2)`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_skew_information(
    rho: *const WysiDensity,
    k: *const WysiObservable,
    out: *mut f64,
) -> WysiStatus {
    guard(|| {
        let v = wysi(&get(rho, "state")?.0, &get(k, "observable")?.0)?;
        put(out, v, "out")
    })
}

/// Wigner-Yanase-Dyson skew information with exponent `p` in `(0, 1)`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_skew_information_dyson(
    rho: *const WysiDensity,
    k: *const WysiObservable,
    p: f64,
    out: *mut f64,
) -> WysiStatus {
    guard(|| {
        let v = wydsi(&get(rho, "state")?.0, &get(k, "observable")?.0, p)?;
        put(out, v, "out")
    })
}

/// `Tr(rho K^2) - Tr(rho K)^2`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_variance(
    rho: *const WysiDensity,
    k: *const WysiObservable,
    out: *mut f64,
) -> WysiStatus {
    guard(|| {
        let v = variance(&get(rho, "state")?.0, &get(k, "observable")?.0)?;
        put(out, v, "out")
    })
}

/// Affinity `Tr(sqrt(rho) sqrt(sigma))`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_affinity(
    rho: *const WysiDensity,
    sigma: *const WysiDensity,
    out: *mut f64,
) -> WysiStatus {
    guard(|| {
        let v = affinity(&get(rho, "rho")?.0, &get(sigma, "sigma")?.0)?;
        put(out, v, "out")
    })
}

/// Hellinger angle `arccos Tr(sqrt(rho) sqrt(sigma))`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_hellinger_angle(
    rho: *const WysiDensity,
    sigma: *const WysiDensity,
    out: *mut f64,
) -> WysiStatus {
    guard(|| {
        let v = hellinger_angle(&get(rho, "rho")?.0, &get(sigma, "sigma")?.0)?;
        put(out, v, "out")
    })
}

fn grid_config(hbar: f64, phi_min: f64, phi_max: f64, steps: usize) -> Result<BoundConfig, Error> {
    if steps < 2 {
        return Err(Error::InvalidArgument("need at least 2 grid points".into()));
    }
    let cfg = BoundConfig::default()
        .with_hbar(hbar)
        .with_grid(uniform_grid(phi_min, phi_max, steps));
    cfg.validate()?;
    Ok(cfg)
}

/// Evaluates the speed bound on `steps` uniform points of `[phi_min, phi_max]`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_bound_check(
    rho0: *const WysiDensity,
    family: *const WysiFamily,
    hbar: f64,
    phi_min: f64,
    phi_max: f64,
    steps: usize,
    out: *mut *mut WysiReport,
) -> WysiStatus {
    guard(|| {
        let cfg = grid_config(hbar, phi_min, phi_max, steps)?;
        let report = bound_check(&get(rho0, "state")?.0, &get(family, "family")?.0, &cfg)?;
        put_box(out, WysiReport(report))
    })
}

/// Closed-form qubit example about the z axis, cross-checked numerically.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_worked_example(
    r0: f64,
    azimuth: f64,
    varpi: f64,
    alpha: f64,
    hbar: f64,
    phi_min: f64,
    phi_max: f64,
    steps: usize,
    out: *mut *mut WysiReport,
) -> WysiStatus {
    guard(|| {
        let cfg = grid_config(hbar, phi_min, phi_max, steps)?;
        let params = WorkedExample {
            r0_mag: r0,
            azimuth,
            varpi,
            alpha,
            hbar,
            ..Default::default()
        };
        put_box(out, WysiReport(worked_example(&params, &cfg.phi_grid)?))
    })
}

/// Number of grid points, or 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wysi_report_len(report: *const WysiReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.len())
}

/// Number of violated grid points, or 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wysi_report_violations(report: *const WysiReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.violations())
}

/// Smallest margin over the grid.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_report_min_margin(report: *const WysiReport, out: *mut f64) -> WysiStatus {
    guard(|| put(out, get(report, "report")?.0.min_margin(), "out"))
}

/// Copies grid point `index` into `out`.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wysi_report_point(
    report: *const WysiReport,
    index: usize,
    out: *mut WysiBoundPoint,
) -> WysiStatus {
    guard(|| {
        let r = get(report, "report")?;
        let p = r.0.points.get(index).ok_or_else(|| {
            Error::InvalidArgument(format!("index {index} out of range for {} points", r.0.len()))
        })?;
        let point = WysiBoundPoint {
            phi: p.phi,
            lhs: p.lhs,
            rhs: p.rhs,
            margin: p.margin,
            wysi: p.wysi,
            cos_hellinger: p.cos_hellinger,
            fd_error: p.fd_error,
            violated: p.violated,
        };
        put(out, point, "out")
    })
}

/// # Safety
/// `report` must be NULL or a live handle from this library; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn wysi_report_free(report: *mut WysiReport) {
    free_box(report)
}
