//! Lily-router Hamiltonians: the full `(4 + 2n)`-node graph, its 7-dimensional
//! reduction, and the isometry relating the two.
//!
//! Edge phases follow the `H[j][k] = |H[j][k]| e^{-i phi_jk}` convention, so the
//! chiral layer contributes `H[input2][k1] = beta e^{-i phi0}`. `phi1` sits on the
//! two edges into the selected routing node `r` and `phi2` on the edges into every
//! other routing node. With this placement the reduced couplings depend only on
//! `gamma = -(phi1 + phi0)` (transmission towards `r`) and `delta = -(phi2 + phi0)`
//! (leakage towards the unselected branches).

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::operator::{HermitianOperator, C64};

/// Reduced-basis dimension.
pub const REDUCED_DIM: usize = 7;

/// Zero-based indices of the reduced basis states `|1~> ... |7~>`.
pub mod basis {
    pub const INPUT1: usize = 0;
    pub const INPUT2: usize = 1;
    pub const CHIRAL: usize = 2;
    pub const ROUTE: usize = 3;
    pub const TARGET: usize = 4;
    pub const UNSELECTED_ROUTES: usize = 5;
    pub const UNSELECTED_OUTPUTS: usize = 6;
}

/// Coupling weight that yields perfect routing at `t = pi`.
pub const OPTIMAL_BETA: f64 = 0.866_025_403_784_438_6; // sqrt(3) / 2
pub const OPTIMAL_GAMMA: f64 = 0.0;
pub const OPTIMAL_DELTA: f64 = PI;

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_phase(x: f64) -> f64 {
    let wrapped = x - TAU * ((x + PI) / TAU).floor();
    // Rounding can land exactly on +pi.
    if wrapped >= PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

/// `e^{ix}`, exact at quarter turns so optimal phases give exact zeros.
pub fn cis(x: f64) -> C64 {
    let w = wrap_phase(x);
    if w == 0.0 {
        C64::new(1.0, 0.0)
    } else if w == -PI {
        C64::new(-1.0, 0.0)
    } else if w == FRAC_PI_2 {
        C64::new(0.0, 1.0)
    } else if w == -FRAC_PI_2 {
        C64::new(0.0, -1.0)
    } else {
        let (s, c) = w.sin_cos();
        C64::new(c, s)
    }
}

/// Gauge-invariant phase combinations `(gamma, delta) = (-(phi1 + phi0), -(phi2 + phi0))`,
/// each wrapped into `[-pi, pi)`.
pub fn effective_phases(phi0: f64, phi1: f64, phi2: f64) -> (f64, f64) {
    (wrap_phase(-(phi1 + phi0)), wrap_phase(-(phi2 + phi0)))
}

fn check_outputs(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::TooFewOutputs(n))
    } else {
        Ok(())
    }
}

/// Router parameters in terms of the raw layer phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LilyParams {
    pub n: usize,
    pub beta: f64,
    pub phi0: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl LilyParams {
    pub fn new(n: usize, beta: f64, phi0: f64, phi1: f64, phi2: f64) -> Result<Self> {
        let p = Self {
            n,
            beta,
            phi0,
            phi1,
            phi2,
        };
        p.validate()?;
        Ok(p)
    }

    /// `beta = sqrt(3)/2`, `phi0 = phi1 = pi`, `phi2 = 0`.
    pub fn optimal(n: usize) -> Result<Self> {
        Self::new(n, OPTIMAL_BETA, PI, PI, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        check_outputs(self.n)?;
        ensure_finite("beta", self.beta)?;
        ensure_finite("phi0", self.phi0)?;
        ensure_finite("phi1", self.phi1)?;
        ensure_finite("phi2", self.phi2)?;
        if self.beta <= 0.0 {
            return Err(Error::invalid("beta", "must be positive"));
        }
        Ok(())
    }

    pub fn effective(&self) -> ReducedParams {
        let (gamma, delta) = effective_phases(self.phi0, self.phi1, self.phi2);
        ReducedParams {
            n: self.n,
            beta: self.beta,
            gamma,
            delta,
        }
    }
}

/// Parameters of the reduced Hamiltonian.
///
/// `beta` may be zero or negative here: weight-noise averages integrate over the
/// whole real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedParams {
    pub n: usize,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl ReducedParams {
    pub fn optimal(n: usize) -> Self {
        Self {
            n,
            beta: OPTIMAL_BETA,
            gamma: OPTIMAL_GAMMA,
            delta: OPTIMAL_DELTA,
        }
    }

    pub fn hamiltonian(&self) -> Result<HermitianOperator> {
        build_reduced_hamiltonian(self.n, self.beta, self.gamma, self.delta)
    }
}

/// Transmission coupling `Xi = beta (1 + e^{i gamma}) / sqrt(2)` between `|3~>` and `|4~>`.
pub fn transmission_coupling(beta: f64, gamma: f64) -> C64 {
    (C64::new(1.0, 0.0) + cis(gamma)) * (beta / SQRT_2)
}

/// Leakage coupling `Gamma = beta sqrt((n-1)/2) (1 + e^{i delta})` between `|3~>` and `|6~>`.
pub fn leakage_coupling(n: usize, beta: f64, delta: f64) -> C64 {
    let scale = beta * ((n - 1) as f64 / 2.0).sqrt();
    (C64::new(1.0, 0.0) + cis(delta)) * scale
}

/// 7x7 reduced Hamiltonian.
pub fn build_reduced_hamiltonian(
    n: usize,
    beta: f64,
    gamma: f64,
    delta: f64,
) -> Result<HermitianOperator> {
    check_outputs(n)?;
    ensure_finite("beta", beta)?;
    ensure_finite("gamma", gamma)?;
    ensure_finite("delta", delta)?;
    Ok(reduced_unchecked(n, beta, gamma, delta))
}

pub(crate) fn reduced_unchecked(n: usize, beta: f64, gamma: f64, delta: f64) -> HermitianOperator {
    use basis::*;
    let one = C64::new(1.0, 0.0);
    let mut h = DMatrix::<C64>::zeros(REDUCED_DIM, REDUCED_DIM);
    h[(INPUT1, INPUT2)] = one;
    h[(INPUT2, CHIRAL)] = C64::new(beta * SQRT_2, 0.0);
    h[(CHIRAL, ROUTE)] = transmission_coupling(beta, gamma);
    h[(CHIRAL, UNSELECTED_ROUTES)] = leakage_coupling(n, beta, delta);
    h[(ROUTE, TARGET)] = one;
    h[(UNSELECTED_ROUTES, UNSELECTED_OUTPUTS)] = one;
    HermitianOperator::from_upper(h)
}

/// Matrix indices of the named roles in the full graph.
///
/// Routing node 0 is the selected node `r`, output node 0 the selected output `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeIndexMap {
    n: usize,
}

impl NodeIndexMap {
    pub fn new(n: usize) -> Result<Self> {
        check_outputs(n)?;
        Ok(Self { n })
    }

    pub fn outputs(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        4 + 2 * self.n
    }

    pub fn input1(&self) -> usize {
        0
    }

    pub fn input2(&self) -> usize {
        1
    }

    pub fn k1(&self) -> usize {
        2
    }

    pub fn k2(&self) -> usize {
        3
    }

    pub fn routing(&self, i: usize) -> usize {
        assert!(i < self.n, "routing index {i} out of range");
        4 + i
    }

    pub fn output(&self, i: usize) -> usize {
        assert!(i < self.n, "output index {i} out of range");
        4 + self.n + i
    }

    pub fn selected_routing(&self) -> usize {
        self.routing(0)
    }

    pub fn selected_output(&self) -> usize {
        self.output(0)
    }
}

/// Full `(4 + 2n)`-dimensional router Hamiltonian.
///
/// Layers: input edge `1-2`; chiral edges `2-k1` (phase `phi0`) and `2-k2`; routing
/// edges from `k1` (phase `phi1` towards `r`, `phi2` towards the others) and `k2`;
/// and output edges pairing routing node `i` with output node `i`.
pub fn build_full_hamiltonian(p: &LilyParams) -> Result<(HermitianOperator, NodeIndexMap)> {
    p.validate()?;
    let map = NodeIndexMap::new(p.n)?;
    let dim = map.dim();
    let one = C64::new(1.0, 0.0);
    let beta = C64::new(p.beta, 0.0);
    let mut h = DMatrix::<C64>::zeros(dim, dim);

    h[(map.input1(), map.input2())] = one;

    h[(map.input2(), map.k1())] = cis(-p.phi0) * p.beta;
    h[(map.input2(), map.k2())] = beta;

    for i in 0..p.n {
        let phase = if i == 0 { p.phi1 } else { p.phi2 };
        h[(map.k1(), map.routing(i))] = cis(-phase) * p.beta;
        h[(map.k2(), map.routing(i))] = beta;
        h[(map.routing(i), map.output(i))] = one;
    }

    Ok((HermitianOperator::from_upper(h), map))
}

/// Columns are the reduced basis states written in the full node basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionIsometry {
    matrix: DMatrix<C64>,
}

impl ReductionIsometry {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// `V^dagger H V`.
    pub fn compress(&self, h: &HermitianOperator) -> DMatrix<C64> {
        self.matrix.adjoint() * h.matrix() * &self.matrix
    }

    /// Embeds a reduced vector into the full node basis.
    pub fn lift(&self, reduced: &nalgebra::DVector<C64>) -> nalgebra::DVector<C64> {
        &self.matrix * reduced
    }
}

/// Isometry grouping identically evolving vertices; `|3~> = (e^{i phi0}|k1> + |k2>)/sqrt(2)`.
pub fn reduction_isometry(n: usize, phi0: f64) -> Result<ReductionIsometry> {
    use basis::*;
    let map = NodeIndexMap::new(n)?;
    ensure_finite("phi0", phi0)?;
    let one = C64::new(1.0, 0.0);
    let mut v = DMatrix::<C64>::zeros(map.dim(), REDUCED_DIM);
    v[(map.input1(), INPUT1)] = one;
    v[(map.input2(), INPUT2)] = one;
    v[(map.k1(), CHIRAL)] = cis(phi0) / SQRT_2;
    v[(map.k2(), CHIRAL)] = one / SQRT_2;
    v[(map.selected_routing(), ROUTE)] = one;
    v[(map.selected_output(), TARGET)] = one;
    let amp = C64::new(1.0 / ((n - 1) as f64).sqrt(), 0.0);
    for i in 1..n {
        v[(map.routing(i), UNSELECTED_ROUTES)] = amp;
        v[(map.output(i), UNSELECTED_OUTPUTS)] = amp;
    }
    Ok(ReductionIsometry { matrix: v })
}
