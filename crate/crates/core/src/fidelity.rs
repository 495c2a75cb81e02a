//! Input/target qubit states and routing fidelities.
//!
//! The input qubit lives on `|1~>, |2~>` and is routed to `|5~>, |4~>`:
//!
//! ```text
//! |in>  = cos(a/2) |1~> + e^{i chi} sin(a/2) |2~>
//! |out> = cos(a/2) |5~> + e^{i chi} sin(a/2) |4~>
//! ```
//!
//! Averaging `|<out|U|in>|^2` over the Bloch sphere with measure
//! `sin(a) da dchi / 4 pi` only involves four entries of `U`, see
//! [`avg_fidelity_closed`].

use std::f64::consts::{PI, TAU};

use nalgebra::DVector;
use rand::Rng;

use crate::error::{ensure_finite, Error, Result};
use crate::graph::{basis, REDUCED_DIM};
use crate::operator::{UnitaryOperator, C64};

const RESIDUE_TOL: f64 = 1e-10;
const CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAngles {
    alpha: f64,
    chi: f64,
}

impl BlochAngles {
    /// `alpha` in `[0, pi]`, `chi` in `[0, 2 pi)`.
    pub fn new(alpha: f64, chi: f64) -> Result<Self> {
        ensure_finite("alpha", alpha)?;
        ensure_finite("chi", chi)?;
        if !(0.0..=PI).contains(&alpha) {
            return Err(Error::invalid("alpha", "must lie in [0, pi]"));
        }
        if !(0.0..TAU).contains(&chi) {
            return Err(Error::invalid("chi", "must lie in [0, 2 pi)"));
        }
        Ok(Self { alpha, chi })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    /// Uniform point on the Bloch sphere: `alpha = acos(1 - 2u)`, `chi = 2 pi v`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        Self {
            alpha: (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos(),
            chi: TAU * v,
        }
    }

    fn amplitudes(&self) -> (C64, C64) {
        let (s, c) = (self.alpha / 2.0).sin_cos();
        let (sc, cc) = self.chi.sin_cos();
        (C64::new(c, 0.0), C64::new(cc, sc) * s)
    }
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("state", format!("norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

fn qubit_state(first: usize, second: usize, angles: &BlochAngles) -> StateVector {
    let (a, b) = angles.amplitudes();
    let mut v = DVector::<C64>::zeros(REDUCED_DIM);
    v[first] = a;
    v[second] = b;
    StateVector { amplitudes: v }
}

pub fn input_state(angles: &BlochAngles) -> StateVector {
    qubit_state(basis::INPUT1, basis::INPUT2, angles)
}

pub fn target_state(angles: &BlochAngles) -> StateVector {
    qubit_state(basis::TARGET, basis::ROUTE, angles)
}

fn check_reduced(u: &UnitaryOperator) -> Result<()> {
    if u.dim() != REDUCED_DIM {
        return Err(Error::DimensionMismatch {
            expected: REDUCED_DIM,
            actual: u.dim(),
        });
    }
    Ok(())
}

/// `|<target|U|input>|^2`.
pub fn routing_fidelity(u: &UnitaryOperator, angles: &BlochAngles) -> Result<f64> {
    check_reduced(u)?;
    let evolved = u.apply(input_state(angles).amplitudes());
    Ok(target_state(angles).amplitudes().dotc(&evolved).norm_sqr())
}

/// The entries `U[5][1], U[4][2], U[4][1], U[5][2]` (one-based) of an evolution.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RoutingBlock {
    pub target_from_input1: C64,
    pub route_from_input2: C64,
    pub route_from_input1: C64,
    pub target_from_input2: C64,
}

impl RoutingBlock {
    pub fn of(u: &UnitaryOperator) -> Result<Self> {
        use basis::*;
        check_reduced(u)?;
        Ok(Self {
            target_from_input1: u.get(TARGET, INPUT1),
            route_from_input2: u.get(ROUTE, INPUT2),
            route_from_input1: u.get(ROUTE, INPUT1),
            target_from_input2: u.get(TARGET, INPUT2),
        })
    }
}

/// Bloch-averaged fidelity from the four relevant entries.
pub fn avg_fidelity_from_block(b: RoutingBlock) -> Result<f64> {
    let u51 = b.target_from_input1;
    let u42 = b.route_from_input2;
    let direct = (u51.norm_sqr() + u42.norm_sqr()) / 3.0;
    let mixed = (u51 * u42.conj()
        + C64::new(b.route_from_input1.norm_sqr(), 0.0)
        + C64::new(b.target_from_input2.norm_sqr(), 0.0)
        + u42 * u51.conj())
        / 6.0;
    if mixed.im.abs() > RESIDUE_TOL {
        return Err(Error::FidelityResidue(mixed.im));
    }
    let value = direct + mixed.re;
    if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&value) {
        return Err(Error::invalid(
            "fidelity",
            format!("{value} lies outside [0, 1]"),
        ));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Closed-form Bloch average of [`routing_fidelity`]:
/// `(|U51|^2 + |U42|^2)/3 + (U51 U42* + |U41|^2 + |U52|^2 + U42 U51*)/6`.
pub fn avg_fidelity_closed(u: &UnitaryOperator) -> Result<f64> {
    avg_fidelity_from_block(RoutingBlock::of(u)?)
}
