//! Seeded Monte Carlo campaigns over random states and generators.
//!
//! Trial `i` draws everything from its own stream `mix_seed(seed, i)`, and
//! results are reduced in trial order, so the output does not depend on how
//! many worker threads run the trials.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{bound_check, cos_hellinger_derivative, exp_family, BoundConfig, BoundReport};
use crate::error::{Error, Result};
use crate::linalg::{matrix_power_integral, psd_spectrum, PSD_TOL};
use crate::states::{
    mix_seed, random_density_with, random_hermitian_with, random_unitary_with, rng_from_seed,
    DensityMatrix,
};
use crate::linalg::Hermitian;

/// Settings for a randomized bound-verification run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyConfig {
    /// Trial `i` uses `dims[i % dims.len()]`.
    pub dims: Vec<usize>,
    /// Fixed rank, or uniformly random in `1..=dim` per trial when `None`.
    pub rank: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Generators are `scale (G + G^dag) / 2`.
    pub generator_scale: f64,
    pub bound: BoundConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 3, 4, 8],
            rank: None,
            trials: 100,
            seed: 42,
            generator_scale: 1.0,
            bound: BoundConfig::default(),
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidArgument("every dimension must be at least 2".into()));
        }
        if let Some(r) = self.rank {
            if r == 0 || self.dims.iter().any(|&d| r > d) {
                return Err(Error::InvalidArgument(format!(
                    "rank {r} must lie in 1..=dim for every dimension"
                )));
            }
        }
        if !(self.generator_scale > 0.0 && self.generator_scale.is_finite()) {
            return Err(Error::InvalidArgument("generator scale must be positive".into()));
        }
        self.bound.validate()
    }
}

/// What identifies one random instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceId {
    pub trial: usize,
    pub dim: usize,
    pub rank: usize,
    pub trial_seed: u64,
}

/// A random probe state and constant generator.
#[derive(Clone, Debug)]
pub struct Instance {
    pub id: InstanceId,
    pub rho0: DensityMatrix,
    pub generator: Hermitian,
}

/// Draws trial `trial` of the campaign.
pub fn instance(cfg: &VerifyConfig, trial: usize) -> Result<Instance> {
    let trial_seed = mix_seed(cfg.seed, trial as u64);
    let mut rng = rng_from_seed(trial_seed);
    let dim = cfg.dims[trial % cfg.dims.len()];
    let rank = cfg.rank.unwrap_or_else(|| rng.random_range(1..=dim));
    let rho0 = random_density_with(&mut rng, dim, rank)?;
    let generator = random_hermitian_with(&mut rng, dim, cfg.generator_scale);
    Ok(Instance {
        id: InstanceId {
            trial,
            dim,
            rank,
            trial_seed,
        },
        rho0,
        generator,
    })
}

/// Bound report for one instance under `exp(-i phi K / hbar)`.
pub fn run_instance(cfg: &VerifyConfig, inst: &Instance) -> Result<BoundReport> {
    let family = exp_family(&inst.generator, cfg.bound.hbar)?;
    bound_check(&inst.rho0, &family, &cfg.bound).map_err(|e| with_context(e, &inst.id))
}

fn with_context(e: Error, id: &InstanceId) -> Error {
    Error::CrossCheck(format!(
        "trial {} (dim {}, rank {}, seed {}): {e}",
        id.trial, id.dim, id.rank, id.trial_seed
    ))
}

/// The grid point with the smallest margin over the whole campaign.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorstCase {
    #[serde(flatten)]
    pub instance: InstanceId,
    pub phi: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifySummary {
    pub instances: usize,
    pub grid_points: usize,
    pub min_margin: f64,
    pub violations: usize,
    pub worst_case_descriptor: Option<WorstCase>,
    pub seed: u64,
}

struct TrialOutcome {
    violations: usize,
    points: usize,
    worst: Option<WorstCase>,
}

/// Runs every trial and reduces the reports in trial order.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifySummary> {
    cfg.validate()?;
    let outcomes = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let inst = instance(cfg, t)?;
            let report = run_instance(cfg, &inst)?;
            Ok(TrialOutcome {
                violations: report.violations(),
                points: report.len(),
                worst: report.worst().map(|p| WorstCase {
                    instance: inst.id,
                    phi: p.phi,
                    lhs: p.lhs,
                    rhs: p.rhs,
                    margin: p.margin,
                }),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut summary = VerifySummary {
        instances: outcomes.len(),
        grid_points: 0,
        min_margin: f64::INFINITY,
        violations: 0,
        worst_case_descriptor: None,
        seed: cfg.seed,
    };
    for o in outcomes {
        summary.grid_points += o.points;
        summary.violations += o.violations;
        if let Some(w) = o.worst {
            if w.margin < summary.min_margin {
                summary.min_margin = w.margin;
                summary.worst_case_descriptor = Some(w);
            }
        }
    }
    Ok(summary)
}

/// Settings for the numerical cross-check run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleConfig {
    pub dim: usize,
    /// Rank of the random states; full rank when `None`.
    pub rank: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub n_quad: usize,
    /// Parameter values per trial at which the derivative routes are compared.
    pub derivative_points: usize,
    pub bound: BoundConfig,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            dim: 4,
            rank: None,
            trials: 100,
            seed: 42,
            n_quad: 64,
            derivative_points: 3,
            bound: BoundConfig::default(),
        }
    }
}

/// Tolerance between the spectral and integral square roots.
pub const SQRT_ROUTE_TOL: f64 = 1e-6;
/// Tolerance of `sqrt(U rho U^dag) = U sqrt(rho) U^dag`.
pub const COVARIANCE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleSummary {
    pub trials: usize,
    /// Trials whose state was singular, so the integral route was skipped.
    pub skipped_integral: usize,
    pub max_sqrt_discrepancy: f64,
    pub max_covariance_discrepancy: f64,
    pub max_derivative_discrepancy: f64,
    pub breaches: Vec<String>,
    pub seed: u64,
}

impl OracleSummary {
    pub fn passed(&self) -> bool {
        self.breaches.is_empty()
    }
}

#[derive(Default)]
struct OracleTrial {
    skipped: bool,
    sqrt: f64,
    covariance: f64,
    derivative: f64,
    breaches: Vec<String>,
}

fn oracle_trial(cfg: &OracleConfig, t: usize) -> Result<OracleTrial> {
    let trial_seed = mix_seed(cfg.seed, t as u64);
    let mut rng = rng_from_seed(trial_seed);
    let rho = random_density_with(&mut rng, cfg.dim, cfg.rank.unwrap_or(cfg.dim))?;
    let k = random_hermitian_with(&mut rng, cfg.dim, 1.0);
    let u = random_unitary_with(&mut rng, cfg.dim);
    let mut out = OracleTrial::default();
    let tag = format!("trial {t} (seed {trial_seed})");

    let sqrt = rho.sqrt()?;
    let min_eig = psd_spectrum(rho.as_hermitian())?.min();
    if min_eig > PSD_TOL {
        let integral = matrix_power_integral(rho.as_hermitian(), 0.5, cfg.n_quad)?;
        out.sqrt = integral.distance(&sqrt);
        if out.sqrt > SQRT_ROUTE_TOL {
            out.breaches.push(format!("{tag}: square-root routes differ by {:e}", out.sqrt));
        }
    } else {
        out.skipped = true;
    }

    let rotated = rho.conjugate_by(&u).sqrt()?;
    out.covariance = rotated.distance(&sqrt.conjugate_by(&u));
    if out.covariance > COVARIANCE_TOL {
        out.breaches.push(format!("{tag}: covariance defect {:e}", out.covariance));
    }

    let family = exp_family(&k, cfg.bound.hbar)?;
    for _ in 0..cfg.derivative_points {
        let phi = rng.random::<f64>() * 2.0 * PI;
        match cos_hellinger_derivative(&rho, &family, phi, &cfg.bound) {
            Ok(pair) => {
                out.derivative = out.derivative.max((pair.numeric - pair.analytic).abs());
            }
            Err(e) => out.breaches.push(format!("{tag}: {e}")),
        }
    }
    Ok(out)
}

/// Compares the spectral and integral square roots, unitary covariance and
/// the two derivative routes over random instances.
pub fn run_oracle(cfg: &OracleConfig) -> Result<OracleSummary> {
    if cfg.trials == 0 || cfg.dim < 2 {
        return Err(Error::InvalidArgument("oracle needs trials >= 1 and dim >= 2".into()));
    }
    if let Some(r) = cfg.rank {
        if r == 0 || r > cfg.dim {
            return Err(Error::InvalidArgument(format!("rank {r} must lie in 1..={}", cfg.dim)));
        }
    }
    cfg.bound.validate()?;
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|t| oracle_trial(cfg, t))
        .collect::<Result<Vec<_>>>()?;
    let mut s = OracleSummary {
        trials: trials.len(),
        skipped_integral: 0,
        max_sqrt_discrepancy: 0.0,
        max_covariance_discrepancy: 0.0,
        max_derivative_discrepancy: 0.0,
        breaches: vec![],
        seed: cfg.seed,
    };
    for t in trials {
        s.skipped_integral += usize::from(t.skipped);
        s.max_sqrt_discrepancy = s.max_sqrt_discrepancy.max(t.sqrt);
        s.max_covariance_discrepancy = s.max_covariance_discrepancy.max(t.covariance);
        s.max_derivative_discrepancy = s.max_derivative_discrepancy.max(t.derivative);
        s.breaches.extend(t.breaches);
    }
    Ok(s)
}
