//! Distinguishability of states: quantum affinity, Hellinger distance and Hellinger angle.

use crate::error::{Error, Result};
use crate::linalg::{hs_inner, Hermitian};
use crate::states::DensityMatrix;

/// Affinities within this much of `[0, 1]` are roundoff and get clamped.
pub const AFFINITY_SLACK: f64 = 1e-9;

/// `A(rho, sigma) = Tr(sqrt(rho) sqrt(sigma))`, clamped into `[0, 1]`.
pub fn affinity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.check_dim(sigma.dim())?;
    affinity_from_sqrts(&rho.sqrt()?, &sigma.sqrt()?)
}

/// Affinity from precomputed square roots.
pub fn affinity_from_sqrts(sqrt_rho: &Hermitian, sqrt_sigma: &Hermitian) -> Result<f64> {
    let a = hs_inner(sqrt_rho, sqrt_sigma)?.re;
    clamp_affinity(a)
}

fn clamp_affinity(a: f64) -> Result<f64> {
    if !(-AFFINITY_SLACK..=1.0 + AFFINITY_SLACK).contains(&a) {
        return Err(Error::CrossCheck(format!("affinity {a} outside [0, 1]")));
    }
    Ok(a.clamp(0.0, 1.0))
}

/// `D(rho, sigma) = 2 - 2 A(rho, sigma)`.
pub fn hellinger_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(2.0 - 2.0 * affinity(rho, sigma)?)
}

/// `L(rho, sigma) = arccos A(rho, sigma)`, in `[0, pi/2]`.
pub fn hellinger_angle(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(affinity(rho, sigma)?.acos())
}

/// Classical Bhattacharyya coefficient `sum_i sqrt(p_i q_i)`.
pub fn bhattacharyya(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum()
}
