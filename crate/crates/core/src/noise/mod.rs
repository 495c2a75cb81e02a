//! Noise models on the reduced router and the fidelity averages they induce.
//!
//! Static models average the Bloch-averaged fidelity over a quadrature rule in the
//! perturbed parameter. Dynamical models draw Ornstein-Uhlenbeck paths for the
//! controls, evolve each realization with a Trotter product and report the
//! ensemble mean with its standard error.

pub mod ensemble;
pub mod ou;
pub mod quadrature;
pub mod von_mises;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use ensemble::EnsembleEstimate;
pub use ou::{ou_path, OuParams, OuPath, SeedLineage};
pub use quadrature::{gauss_hermite, von_mises_rule, DEFAULT_HERMITE_NODES, DEFAULT_PHASE_GRID};
pub use von_mises::{bessel_i0, bessel_i0_scaled, von_mises_pdf};

use crate::dynamics::{
    split_time, trotter_fidelity_series, Eigensystem, ParameterPath, PathSamples,
};
use crate::error::{ensure_finite, Error, Result};
use crate::fidelity::avg_fidelity_from_block;
use crate::graph::{reduced_unchecked, ReducedParams, OPTIMAL_BETA, OPTIMAL_DELTA, OPTIMAL_GAMMA};

/// Default number of OU realizations per ensemble.
pub const DEFAULT_REALIZATIONS: usize = 2000;

/// Random-stream channels, one per fluctuating control.
const CHANNEL_GAMMA: u32 = 0;
const CHANNEL_DELTA: u32 = 1;
const CHANNEL_BETA: u32 = 2;

/// One of the four noise models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseSpec {
    /// Independent von Mises offsets on `gamma` and `delta` with concentration `k`.
    StaticPhase { k: f64 },
    /// Gaussian offset of standard deviation `sigma` on `beta`.
    StaticWeight { sigma: f64 },
    /// Independent OU processes for `gamma` (mean 0) and `delta` (mean pi).
    OuPhase { theta: f64, volatility: f64 },
    /// OU process for `beta` around `sqrt(3)/2`.
    OuWeight { theta: f64, volatility: f64 },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::StaticPhase { k } => {
                ensure_finite("k", k)?;
                if k <= 0.0 {
                    return Err(Error::invalid("k", "must be positive"));
                }
            }
            NoiseSpec::StaticWeight { sigma } => {
                ensure_finite("sigma", sigma)?;
                if sigma <= 0.0 {
                    return Err(Error::invalid("sigma", "must be positive"));
                }
            }
            NoiseSpec::OuPhase { theta, volatility }
            | NoiseSpec::OuWeight { theta, volatility } => {
                OuParams::new(theta, 0.0, volatility)?;
            }
        }
        Ok(())
    }

    /// Common noise-strength scale: `1/sqrt(k)`, `sigma`, or `volatility/sqrt(2 theta)`.
    pub fn sigma_eff(&self) -> f64 {
        match *self {
            NoiseSpec::StaticPhase { k } => 1.0 / k.sqrt(),
            NoiseSpec::StaticWeight { sigma } => sigma,
            NoiseSpec::OuPhase { theta, volatility }
            | NoiseSpec::OuWeight { theta, volatility } => volatility / (2.0 * theta).sqrt(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseSpec::StaticPhase { .. } => "static-phase",
            NoiseSpec::StaticWeight { .. } => "static-weight",
            NoiseSpec::OuPhase { .. } => "ou-phase",
            NoiseSpec::OuWeight { .. } => "ou-weight",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, NoiseSpec::OuPhase { .. } | NoiseSpec::OuWeight { .. })
    }
}

/// Numerical settings for the OU ensembles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub dt: f64,
    pub realizations: usize,
    pub master_seed: u64,
}

fn check_times(times: &[f64]) -> Result<()> {
    let mut last = 0.0;
    for &t in times {
        ensure_finite("t", t)?;
        if t < last {
            return Err(Error::invalid(
                "times",
                "must be non-negative and non-decreasing",
            ));
        }
        last = t;
    }
    Ok(())
}

/// Averages `F_U(t)` over a weighted set of reduced Hamiltonians, one
/// eigendecomposition per node.
fn weighted_static_curve(nodes: &[(ReducedParams, f64)], times: &[f64]) -> Result<Vec<f64>> {
    check_times(times)?;
    let per_node = nodes
        .par_iter()
        .map(|(p, w)| {
            if *w == 0.0 {
                return Ok(vec![0.0; times.len()]);
            }
            let eig = Eigensystem::new(&reduced_unchecked(p.n, p.beta, p.gamma, p.delta))?;
            times
                .iter()
                .map(|&t| Ok(w * avg_fidelity_from_block(eig.routing_block(t))?))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let mut total = vec![0.0; times.len()];
    for row in &per_node {
        for (acc, v) in total.iter_mut().zip(row) {
            *acc += v;
        }
    }
    Ok(total.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
}

/// Static von Mises phase noise at every time in `times`: tensor-product periodic
/// trapezoid over `(eps1, eps2)` with `gamma = eps1`, `delta = pi + eps2`.
pub fn static_phase_curve(n: usize, times: &[f64], k: f64, grid: usize) -> Result<Vec<f64>> {
    NoiseSpec::StaticPhase { k }.validate()?;
    ReducedParams::optimal(n).hamiltonian()?;
    let rule = von_mises_rule(k, grid)?;
    let mut nodes = Vec::with_capacity(rule.len() * rule.len());
    for &(e1, w1) in &rule {
        for &(e2, w2) in &rule {
            let p = ReducedParams {
                n,
                beta: OPTIMAL_BETA,
                gamma: OPTIMAL_GAMMA + e1,
                delta: OPTIMAL_DELTA + e2,
            };
            nodes.push((p, w1 * w2));
        }
    }
    weighted_static_curve(&nodes, times)
}

pub fn static_phase_avg_fidelity(n: usize, t: f64, k: f64, grid: usize) -> Result<f64> {
    Ok(static_phase_curve(n, &[t], k, grid)?[0])
}

/// Static Gaussian weight noise: Gauss-Hermite over `beta = sqrt(3)/2 + sigma x`.
pub fn static_weight_curve(n: usize, times: &[f64], sigma: f64, nodes: usize) -> Result<Vec<f64>> {
    NoiseSpec::StaticWeight { sigma }.validate()?;
    ReducedParams::optimal(n).hamiltonian()?;
    let weighted: Vec<(ReducedParams, f64)> = gauss_hermite(nodes)?
        .into_iter()
        .map(|(x, w)| {
            let mut p = ReducedParams::optimal(n);
            p.beta += sigma * x;
            (p, w)
        })
        .collect();
    weighted_static_curve(&weighted, times)
}

pub fn static_weight_avg_fidelity(n: usize, t: f64, sigma: f64, nodes: usize) -> Result<f64> {
    Ok(static_weight_curve(n, &[t], sigma, nodes)?[0])
}

/// Number of path samples needed to reach the last of `times`.
fn path_length(times: &[f64], dt: f64) -> usize {
    let t_max = times.last().copied().unwrap_or(0.0);
    let (whole, rest) = split_time(t_max, dt);
    (whole + usize::from(rest > 0.0)).max(1)
}

fn check_ensemble(cfg: &EnsembleConfig) -> Result<()> {
    ensure_finite("dt", cfg.dt)?;
    if cfg.dt <= 0.0 {
        return Err(Error::invalid("dt", "must be positive"));
    }
    if cfg.realizations < 2 {
        return Err(Error::invalid("realizations", "need at least two"));
    }
    Ok(())
}

/// Runs `realization` for every index and reduces per time in index order.
fn ensemble_curve<F>(
    times: &[f64],
    cfg: &EnsembleConfig,
    realization: F,
) -> Result<Vec<EnsembleEstimate>>
where
    F: Fn(u64) -> Result<Vec<f64>> + Sync,
{
    check_times(times)?;
    check_ensemble(cfg)?;
    let runs = (0..cfg.realizations as u64)
        .into_par_iter()
        .map(&realization)
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let mut column = vec![0.0; runs.len()];
    (0..times.len())
        .map(|i| {
            for (slot, run) in column.iter_mut().zip(&runs) {
                *slot = run[i];
            }
            EnsembleEstimate::from_samples(&column)
        })
        .collect()
}

/// OU phase noise: per realization two independent paths, `gamma` around 0 and
/// `delta` around pi, sharing `(theta, volatility)`.
pub fn ou_phase_curve(
    n: usize,
    times: &[f64],
    theta: f64,
    volatility: f64,
    cfg: &EnsembleConfig,
) -> Result<Vec<EnsembleEstimate>> {
    let fixed = ReducedParams::optimal(n);
    fixed.hamiltonian()?;
    let gamma = OuParams::new(theta, OPTIMAL_GAMMA, volatility)?;
    let delta = OuParams::new(theta, OPTIMAL_DELTA, volatility)?;
    let len = path_length(times, cfg.dt);
    ensemble_curve(times, cfg, |r| {
        let g = ou_path(
            &gamma,
            cfg.dt,
            len - 1,
            SeedLineage::new(cfg.master_seed, r, CHANNEL_GAMMA),
        )?;
        let d = ou_path(
            &delta,
            cfg.dt,
            len - 1,
            SeedLineage::new(cfg.master_seed, r, CHANNEL_DELTA),
        )?;
        let samples = g.samples.into_iter().zip(d.samples).collect();
        let path = ParameterPath::new(cfg.dt, PathSamples::Phases(samples))?;
        trotter_fidelity_series(&fixed, &path, times)
    })
}

#[allow(clippy::too_many_arguments)]
pub fn ou_phase_avg_fidelity(
    n: usize,
    t: f64,
    theta: f64,
    volatility: f64,
    dt: f64,
    n_realizations: usize,
    master_seed: u64,
) -> Result<EnsembleEstimate> {
    let cfg = EnsembleConfig {
        dt,
        realizations: n_realizations,
        master_seed,
    };
    Ok(ou_phase_curve(n, &[t], theta, volatility, &cfg)?[0])
}

/// OU weight noise: one path for `beta` around `sqrt(3)/2`, phases held optimal.
pub fn ou_weight_curve(
    n: usize,
    times: &[f64],
    theta: f64,
    volatility: f64,
    cfg: &EnsembleConfig,
) -> Result<Vec<EnsembleEstimate>> {
    let fixed = ReducedParams::optimal(n);
    fixed.hamiltonian()?;
    let beta = OuParams::new(theta, OPTIMAL_BETA, volatility)?;
    let len = path_length(times, cfg.dt);
    ensemble_curve(times, cfg, |r| {
        let b = ou_path(
            &beta,
            cfg.dt,
            len - 1,
            SeedLineage::new(cfg.master_seed, r, CHANNEL_BETA),
        )?;
        let path = ParameterPath::new(cfg.dt, PathSamples::Weight(b.samples))?;
        trotter_fidelity_series(&fixed, &path, times)
    })
}

#[allow(clippy::too_many_arguments)]
pub fn ou_weight_avg_fidelity(
    n: usize,
    t: f64,
    theta: f64,
    volatility: f64,
    dt: f64,
    n_realizations: usize,
    master_seed: u64,
) -> Result<EnsembleEstimate> {
    let cfg = EnsembleConfig {
        dt,
        realizations: n_realizations,
        master_seed,
    };
    Ok(ou_weight_curve(n, &[t], theta, volatility, &cfg)?[0])
}
