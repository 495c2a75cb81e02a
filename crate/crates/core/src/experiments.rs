//! Experiment families: fidelity-vs-time curves, peak detection, peak-vs-noise
//! scaling tables and resource counts.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Eigensystem, DEFAULT_DT};
use crate::error::{ensure_finite, Error, Result};
use crate::fidelity::avg_fidelity_from_block;
use crate::graph::ReducedParams;
use crate::noise::{
    ou_phase_curve, ou_weight_curve, static_phase_curve, static_weight_curve, EnsembleConfig,
    NoiseSpec, DEFAULT_HERMITE_NODES, DEFAULT_PHASE_GRID, DEFAULT_REALIZATIONS,
};

/// Default search window half-width around `t = pi`.
pub const DEFAULT_WINDOW_HALF_WIDTH: f64 = 0.5;
/// Max-minus-min below which a windowed curve is reported as flat.
pub const FLAT_TOL: f64 = 1e-12;
/// Mean-reversion rate used when building OU scaling tables.
pub const SCALING_THETA: f64 = 1.0;

/// `points` equally spaced times from `t_min` to `t_max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    #[serde(default)]
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            t_min: 0.0,
            t_max: 4.0 * PI,
            points: 512,
        }
    }
}

impl TimeGrid {
    pub fn new(t_max: f64, points: usize) -> Self {
        Self {
            t_min: 0.0,
            t_max,
            points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("t_min", self.t_min)?;
        ensure_finite("t_max", self.t_max)?;
        if self.t_max <= 0.0 {
            return Err(Error::invalid("t_max", "must be positive"));
        }
        if self.t_min < 0.0 || self.t_min >= self.t_max {
            return Err(Error::invalid("t_min", "must lie in [0, t_max)"));
        }
        if self.points < 2 {
            return Err(Error::invalid("points", "need at least two"));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.t_max
                } else {
                    self.t_min + (self.t_max - self.t_min) * (i as f64 / last)
                }
            })
            .collect()
    }
}

/// Quadrature sizes, Trotter step, ensemble size and seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericConfig {
    pub phase_grid: usize,
    pub hermite_nodes: usize,
    pub dt: f64,
    pub realizations: usize,
    pub master_seed: u64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            phase_grid: DEFAULT_PHASE_GRID,
            hermite_nodes: DEFAULT_HERMITE_NODES,
            dt: DEFAULT_DT,
            realizations: DEFAULT_REALIZATIONS,
            master_seed: 0,
        }
    }
}

impl NumericConfig {
    pub fn ensemble(&self) -> EnsembleConfig {
        EnsembleConfig {
            dt: self.dt,
            realizations: self.realizations,
            master_seed: self.master_seed,
        }
    }
}

/// One curve to compute. `noise: None` is the noiseless router.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub noise: Option<NoiseSpec>,
    pub n: usize,
    #[serde(default)]
    pub time_grid: TimeGrid,
    #[serde(default)]
    pub numerics: NumericConfig,
}

impl Scenario {
    pub fn new(noise: Option<NoiseSpec>, n: usize) -> Self {
        Self {
            noise,
            n,
            time_grid: TimeGrid::default(),
            numerics: NumericConfig::default(),
        }
    }

    pub fn with_time_grid(mut self, grid: TimeGrid) -> Self {
        self.time_grid = grid;
        self
    }

    pub fn with_numerics(mut self, numerics: NumericConfig) -> Self {
        self.numerics = numerics;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::TooFewOutputs(self.n));
        }
        self.time_grid.validate()?;
        if let Some(spec) = &self.noise {
            spec.validate()?;
            let num = &self.numerics;
            match spec {
                NoiseSpec::StaticPhase { .. } => {
                    if num.phase_grid < 3 || num.phase_grid % 2 == 0 {
                        return Err(Error::invalid("phase_grid", "must be odd and >= 3"));
                    }
                }
                NoiseSpec::StaticWeight { .. } => {
                    if num.hermite_nodes == 0 {
                        return Err(Error::invalid("hermite_nodes", "need at least one"));
                    }
                }
                NoiseSpec::OuPhase { .. } | NoiseSpec::OuWeight { .. } => {
                    ensure_finite("dt", num.dt)?;
                    if num.dt <= 0.0 {
                        return Err(Error::invalid("dt", "must be positive"));
                    }
                    if num.realizations < 2 {
                        return Err(Error::invalid("realizations", "need at least two"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn model_name(&self) -> &'static str {
        self.noise.as_ref().map_or("noiseless", NoiseSpec::name)
    }

    pub fn sigma_eff(&self) -> f64 {
        self.noise.as_ref().map_or(0.0, NoiseSpec::sigma_eff)
    }

    pub fn is_stochastic(&self) -> bool {
        self.noise.as_ref().is_some_and(NoiseSpec::is_stochastic)
    }
}

/// Averaged fidelity sampled on a time grid. `stderr` is present only for
/// Monte-Carlo models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub scenario: Scenario,
    pub times: Vec<f64>,
    pub mean_fidelity: Vec<f64>,
    pub stderr: Option<Vec<f64>>,
}

impl FidelityCurve {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Maximum of a curve inside a search window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakRecord {
    pub t_peak: f64,
    pub f_peak: f64,
    pub sigma_eff: f64,
    pub n: usize,
    /// Set when the curve is constant (within [`FLAT_TOL`]) over the window.
    pub flat: bool,
}

/// Evaluates the scenario's averaged fidelity at every grid time.
pub fn fidelity_curve(s: &Scenario) -> Result<FidelityCurve> {
    s.validate()?;
    let times = s.time_grid.times();
    let num = &s.numerics;
    let (mean_fidelity, stderr) = match s.noise {
        None => {
            let eig = Eigensystem::new(&ReducedParams::optimal(s.n).hamiltonian()?)?;
            let f = times
                .iter()
                .map(|&t| avg_fidelity_from_block(eig.routing_block(t)))
                .collect::<Result<Vec<f64>>>()?;
            (f, None)
        }
        Some(NoiseSpec::StaticPhase { k }) => {
            (static_phase_curve(s.n, &times, k, num.phase_grid)?, None)
        }
        Some(NoiseSpec::StaticWeight { sigma }) => (
            static_weight_curve(s.n, &times, sigma, num.hermite_nodes)?,
            None,
        ),
        Some(NoiseSpec::OuPhase { theta, volatility }) => split(ou_phase_curve(
            s.n,
            &times,
            theta,
            volatility,
            &num.ensemble(),
        )?),
        Some(NoiseSpec::OuWeight { theta, volatility }) => split(ou_weight_curve(
            s.n,
            &times,
            theta,
            volatility,
            &num.ensemble(),
        )?),
    };
    Ok(FidelityCurve {
        scenario: *s,
        times,
        mean_fidelity,
        stderr,
    })
}

fn split(estimates: Vec<crate::noise::EnsembleEstimate>) -> (Vec<f64>, Option<Vec<f64>>) {
    let mean = estimates.iter().map(|e| e.mean.clamp(0.0, 1.0)).collect();
    let stderr = estimates.iter().map(|e| e.stderr).collect();
    (mean, Some(stderr))
}

/// Default peak search window `[pi - 0.5, pi + 0.5]`.
pub fn default_window() -> (f64, f64) {
    (
        PI - DEFAULT_WINDOW_HALF_WIDTH,
        PI + DEFAULT_WINDOW_HALF_WIDTH,
    )
}

/// Locates the maximum of `curve` over grid points in `window`, refined by the
/// parabola through the discrete maximum and its two grid neighbours.
///
/// Ties go to the smaller time. A curve that is flat over the window reports its
/// first windowed grid point with `flat` set.
pub fn peak_scan(curve: &FidelityCurve, window: (f64, f64)) -> Result<PeakRecord> {
    let (lo, hi) = window;
    ensure_finite("t_lo", lo)?;
    ensure_finite("t_hi", hi)?;
    let inside: Vec<usize> = (0..curve.len())
        .filter(|&i| curve.times[i] >= lo && curve.times[i] <= hi)
        .collect();
    let (Some(&first), Some(&last)) = (inside.first(), inside.last()) else {
        return Err(Error::EmptyWindow { lo, hi });
    };
    let f = &curve.mean_fidelity;
    let t = &curve.times;
    let mut best = first;
    let (mut fmin, mut fmax) = (f[first], f[first]);
    for i in first..=last {
        if f[i] > f[best] {
            best = i;
        }
        fmin = fmin.min(f[i]);
        fmax = fmax.max(f[i]);
    }
    let record = |t_peak: f64, f_peak: f64, flat: bool| PeakRecord {
        t_peak,
        f_peak: f_peak.clamp(0.0, 1.0),
        sigma_eff: curve.scenario.sigma_eff(),
        n: curve.scenario.n,
        flat,
    };
    if fmax - fmin < FLAT_TOL {
        return Ok(record(t[first], f[first], true));
    }
    if best == 0 || best + 1 >= curve.len() {
        return Ok(record(t[best], f[best], false));
    }
    let (t_peak, f_peak) = parabola_vertex(
        (t[best - 1], f[best - 1]),
        (t[best], f[best]),
        (t[best + 1], f[best + 1]),
    );
    if f_peak < f[best] {
        return Ok(record(t[best], f[best], false));
    }
    Ok(record(
        t_peak.clamp(t[best - 1], t[best + 1]),
        f_peak,
        false,
    ))
}

/// Vertex of the parabola through three points with distinct abscissae.
fn parabola_vertex((x0, y0): (f64, f64), (x1, y1): (f64, f64), (x2, y2): (f64, f64)) -> (f64, f64) {
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if a >= 0.0 || !a.is_finite() {
        return (x1, y1);
    }
    let b = d01 - a * (x0 + x1);
    let xv = -b / (2.0 * a);
    let yv = y1 + (xv - x1) * (d01 + a * (xv - x0));
    (xv, yv)
}

/// The four noise families swept by [`peak_scaling`], each parametrized by `sigma_eff`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelFamily {
    StaticPhase,
    StaticWeight,
    OuPhase,
    OuWeight,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 4] = [
        ModelFamily::StaticPhase,
        ModelFamily::StaticWeight,
        ModelFamily::OuPhase,
        ModelFamily::OuWeight,
    ];

    /// `k = 1/sigma^2`, Gaussian `sigma`, or OU volatility `sigma sqrt(2 theta)`
    /// with `theta = 1`.
    pub fn spec(self, sigma_eff: f64) -> Result<NoiseSpec> {
        ensure_finite("sigma_eff", sigma_eff)?;
        if sigma_eff <= 0.0 {
            return Err(Error::invalid("sigma_eff", "must be positive"));
        }
        let volatility = sigma_eff * (2.0 * SCALING_THETA).sqrt();
        let spec = match self {
            ModelFamily::StaticPhase => NoiseSpec::StaticPhase {
                k: 1.0 / (sigma_eff * sigma_eff),
            },
            ModelFamily::StaticWeight => NoiseSpec::StaticWeight { sigma: sigma_eff },
            ModelFamily::OuPhase => NoiseSpec::OuPhase {
                theta: SCALING_THETA,
                volatility,
            },
            ModelFamily::OuWeight => NoiseSpec::OuWeight {
                theta: SCALING_THETA,
                volatility,
            },
        };
        Ok(spec)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::StaticPhase => "static-phase",
            ModelFamily::StaticWeight => "static-weight",
            ModelFamily::OuPhase => "ou-phase",
            ModelFamily::OuWeight => "ou-weight",
        }
    }
}

/// Peak table over `sigma_grid x n_list`, ordered by sigma then n.
///
/// `base` supplies the time grid and numerics; its `noise` and `n` are replaced
/// per row.
pub fn peak_scaling(
    family: ModelFamily,
    sigma_grid: &[f64],
    n_list: &[usize],
    base: &Scenario,
    window: (f64, f64),
) -> Result<Vec<PeakRecord>> {
    let specs = sigma_grid
        .iter()
        .map(|&s| family.spec(s))
        .collect::<Result<Vec<_>>>()?;
    for &n in n_list {
        if n < 2 {
            return Err(Error::TooFewOutputs(n));
        }
    }
    let mut table = Vec::with_capacity(specs.len() * n_list.len());
    for spec in specs {
        for &n in n_list {
            let scenario = Scenario {
                noise: Some(spec),
                n,
                ..*base
            };
            table.push(peak_scan(&fidelity_curve(&scenario)?, window)?);
        }
    }
    Ok(table)
}

/// Resource counts for `n` and half-channel length `d`:
/// `R_QST = d (n^2 + n)` and `R_QR = d (n + 1) + 2`.
pub fn resource_counts(n: u64, d: u64) -> Result<(u64, u64)> {
    if n < 1 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if d < 1 {
        return Err(Error::invalid("d", "must be at least 1"));
    }
    let overflow = || Error::invalid("n", "resource count overflows u64");
    let qst = n
        .checked_mul(n)
        .and_then(|sq| sq.checked_add(n))
        .and_then(|s| s.checked_mul(d))
        .ok_or_else(overflow)?;
    let qr = n
        .checked_add(1)
        .and_then(|s| s.checked_mul(d))
        .and_then(|s| s.checked_add(2))
        .ok_or_else(overflow)?;
    Ok((qst, qr))
}
