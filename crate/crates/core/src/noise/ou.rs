//! Ornstein-Uhlenbeck paths with the exact Gaussian transition and counter-based
//! per-realization random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// `dX = theta (mu - X) dt + volatility dW`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OuParams {
    pub theta: f64,
    pub mu: f64,
    pub volatility: f64,
}

impl OuParams {
    pub fn new(theta: f64, mu: f64, volatility: f64) -> Result<Self> {
        let p = Self {
            theta,
            mu,
            volatility,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("theta", self.theta)?;
        ensure_finite("mu", self.mu)?;
        ensure_finite("volatility", self.volatility)?;
        if self.theta <= 0.0 {
            return Err(Error::invalid("theta", "must be positive"));
        }
        if self.volatility < 0.0 {
            return Err(Error::invalid("volatility", "must be non-negative"));
        }
        Ok(())
    }

    /// Stationary variance `volatility^2 / (2 theta)`.
    pub fn stationary_variance(&self) -> f64 {
        self.volatility * self.volatility / (2.0 * self.theta)
    }
}

/// Identifies one random stream: realization `realization` of channel `channel`
/// under `master_seed`. Streams never depend on scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedLineage {
    pub master_seed: u64,
    pub realization: u64,
    pub channel: u32,
}

impl SeedLineage {
    pub fn new(master_seed: u64, realization: u64, channel: u32) -> Self {
        Self {
            master_seed,
            realization,
            channel,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..12].copy_from_slice(&self.channel.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.realization);
        rng
    }
}

/// Samples `X_0 ... X_steps` on a grid of spacing `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct OuPath {
    pub dt: f64,
    pub samples: Vec<f64>,
    pub lineage: SeedLineage,
}

/// Draws `X_0` from the stationary law and advances with
/// `X_{j+1} = mu + (X_j - mu) e^{-theta dt} + s sqrt(1 - e^{-2 theta dt}) xi_j`,
/// `s^2 = volatility^2 / (2 theta)`.
pub fn ou_path(params: &OuParams, dt: f64, steps: usize, lineage: SeedLineage) -> Result<OuPath> {
    params.validate()?;
    ensure_finite("dt", dt)?;
    if dt <= 0.0 {
        return Err(Error::invalid("dt", "must be positive"));
    }
    let mut rng = lineage.rng();
    let spread = params.stationary_variance().sqrt();
    let decay = (-params.theta * dt).exp();
    let kick = spread * (-(-2.0 * params.theta * dt).exp_m1()).sqrt();

    let mut samples = Vec::with_capacity(steps + 1);
    let z: f64 = StandardNormal.sample(&mut rng);
    let mut x = params.mu + spread * z;
    samples.push(x);
    for _ in 0..steps {
        let z: f64 = StandardNormal.sample(&mut rng);
        x = params.mu + (x - params.mu) * decay + kick * z;
        samples.push(x);
    }
    Ok(OuPath {
        dt,
        samples,
        lineage,
    })
}
