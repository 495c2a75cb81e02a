use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_realizations: usize,
}

impl EnsembleEstimate {
    /// Accumulates in slice order, so callers that index realizations get results
    /// independent of how the samples were produced.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let count = samples.len();
        if count < 2 {
            return Err(Error::invalid("realizations", "need at least two samples"));
        }
        let n = count as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
        let std = (ss / (n - 1.0)).sqrt();
        Ok(Self {
            mean,
            stderr: std / n.sqrt(),
            n_realizations: count,
        })
    }
}
