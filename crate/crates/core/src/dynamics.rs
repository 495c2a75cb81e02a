//! Unitary evolution under fixed and piecewise-constant Hamiltonians.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{ensure_finite, Error, Result};
use crate::fidelity::{avg_fidelity_from_block, RoutingBlock};
use crate::graph::{basis, reduced_unchecked, ReducedParams, REDUCED_DIM};
use crate::operator::{HermitianOperator, UnitaryOperator, C64};

/// Default Trotter step for dynamical-noise runs.
pub const DEFAULT_DT: f64 = PI / 400.0;

const STATIC_UNITARITY_TOL: f64 = 1e-10;
const TROTTER_UNITARITY_TOL: f64 = 1e-8;

/// Spectral decomposition `H = Q diag(lambda) Q^dagger`.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    values: DVector<f64>,
    vectors: DMatrix<C64>,
}

impl Eigensystem {
    pub fn new(h: &HermitianOperator) -> Result<Self> {
        let eig = SymmetricEigen::new(h.matrix().clone());
        if eig.eigenvalues.iter().any(|v| !v.is_finite())
            || eig
                .eigenvectors
                .iter()
                .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Eigen("non-finite eigenpairs".into()));
        }
        Ok(Self {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.values
    }

    fn phases(&self, t: f64) -> Vec<C64> {
        self.values
            .iter()
            .map(|&l| {
                let (s, c) = (-l * t).sin_cos();
                C64::new(c, s)
            })
            .collect()
    }

    /// `e^{-iHt}`; exactly the identity at `t = 0`.
    pub fn evolve(&self, t: f64) -> UnitaryOperator {
        if t == 0.0 {
            return UnitaryOperator::identity(self.values.len());
        }
        let phases = self.phases(t);
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        UnitaryOperator::new_unchecked(scaled * self.vectors.adjoint())
    }

    /// Single matrix element `<row| e^{-iHt} |col>`.
    pub fn element(&self, row: usize, col: usize, t: f64) -> C64 {
        if t == 0.0 {
            return C64::new(f64::from(u8::from(row == col)), 0.0);
        }
        self.phases(t)
            .iter()
            .enumerate()
            .map(|(j, p)| self.vectors[(row, j)] * p * self.vectors[(col, j)].conj())
            .sum()
    }

    /// The four entries of `e^{-iHt}` that enter the averaged routing fidelity.
    pub fn routing_block(&self, t: f64) -> RoutingBlock {
        use basis::*;
        let mut block = RoutingBlock::default();
        if t == 0.0 {
            return block;
        }
        let phases = self.phases(t);
        for (j, p) in phases.iter().enumerate() {
            let q = |row: usize| self.vectors[(row, j)];
            let in1 = p * q(INPUT1).conj();
            let in2 = p * q(INPUT2).conj();
            block.target_from_input1 += q(TARGET) * in1;
            block.route_from_input2 += q(ROUTE) * in2;
            block.route_from_input1 += q(ROUTE) * in1;
            block.target_from_input2 += q(TARGET) * in2;
        }
        block
    }

    /// `e^{-iHt} v` for every column of `v`.
    fn apply(&self, t: f64, v: &DMatrix<C64>) -> DMatrix<C64> {
        if t == 0.0 {
            return v.clone();
        }
        let phases = self.phases(t);
        let mut coeffs = self.vectors.adjoint() * v;
        for (j, mut row) in coeffs.row_iter_mut().enumerate() {
            row *= phases[j];
        }
        &self.vectors * coeffs
    }
}

/// `U = e^{-iHt}` via the Hermitian eigendecomposition.
pub fn hermitian_expm(h: &HermitianOperator, t: f64) -> Result<UnitaryOperator> {
    ensure_finite("t", t)?;
    let u = Eigensystem::new(h)?.evolve(t);
    debug_assert!(u.unitarity_deviation() < STATIC_UNITARITY_TOL);
    Ok(u)
}

/// Time-varying part of the reduced parameters, one sample per Trotter step.
#[derive(Debug, Clone, PartialEq)]
pub enum PathSamples {
    /// `(gamma_t, delta_t)` pairs.
    Phases(Vec<(f64, f64)>),
    /// `beta_t` values.
    Weight(Vec<f64>),
}

impl PathSamples {
    pub fn len(&self) -> usize {
        match self {
            PathSamples::Phases(v) => v.len(),
            PathSamples::Weight(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Piecewise-constant control schedule: sample `j` holds on `[j dt, (j+1) dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPath {
    dt: f64,
    samples: PathSamples,
}

impl ParameterPath {
    pub fn new(dt: f64, samples: PathSamples) -> Result<Self> {
        ensure_finite("dt", dt)?;
        if dt <= 0.0 {
            return Err(Error::invalid("dt", "must be positive"));
        }
        if samples.is_empty() {
            return Err(Error::invalid("path", "must contain at least one sample"));
        }
        let finite = match &samples {
            PathSamples::Phases(v) => v.iter().all(|(g, d)| g.is_finite() && d.is_finite()),
            PathSamples::Weight(v) => v.iter().all(|b| b.is_finite()),
        };
        if !finite {
            return Err(Error::invalid("path", "samples must be finite"));
        }
        Ok(Self { dt, samples })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &PathSamples {
        &self.samples
    }

    /// Total time covered by the path.
    pub fn duration(&self) -> f64 {
        self.dt * self.len() as f64
    }

    /// Reduced parameters in force during step `j`.
    pub fn params_at(&self, fixed: &ReducedParams, j: usize) -> ReducedParams {
        let mut p = *fixed;
        match &self.samples {
            PathSamples::Phases(v) => {
                p.gamma = v[j].0;
                p.delta = v[j].1;
            }
            PathSamples::Weight(v) => p.beta = v[j],
        }
        p
    }

    fn step_hamiltonian(&self, fixed: &ReducedParams, j: usize) -> HermitianOperator {
        let p = self.params_at(fixed, j);
        reduced_unchecked(p.n, p.beta, p.gamma, p.delta)
    }
}

/// First-order Trotter product `e^{-iH_{m-1} dt} ... e^{-iH_0 dt}` over the whole path.
pub fn trotter_evolve(fixed: &ReducedParams, path: &ParameterPath) -> Result<UnitaryOperator> {
    fixed.hamiltonian()?;
    let mut u = DMatrix::<C64>::identity(REDUCED_DIM, REDUCED_DIM);
    for j in 0..path.len() {
        let step = Eigensystem::new(&path.step_hamiltonian(fixed, j))?.evolve(path.dt);
        u = step.matrix() * u;
    }
    let u = UnitaryOperator::new_unchecked(u);
    debug_assert!(u.unitarity_deviation() < TROTTER_UNITARITY_TOL);
    Ok(u)
}

/// Splits `t` into whole steps plus a remainder, snapping remainders that are
/// pure rounding noise to zero.
pub(crate) fn split_time(t: f64, dt: f64) -> (usize, f64) {
    let ratio = t / dt;
    let whole = (ratio + 1e-9).floor().max(0.0);
    let rest = t - whole * dt;
    if rest <= dt * 1e-9 {
        (whole as usize, 0.0)
    } else {
        (whole as usize, rest)
    }
}

/// Bloch-averaged routing fidelity of the Trotterized evolution at each of `times`.
///
/// Only the two input columns of the propagator are carried, so the cost per step is
/// one 7x7 eigendecomposition. A time that falls inside a step is reached with a
/// partial step of the sample in force there.
pub fn trotter_fidelity_series(
    fixed: &ReducedParams,
    path: &ParameterPath,
    times: &[f64],
) -> Result<Vec<f64>> {
    fixed.hamiltonian()?;
    let dt = path.dt;
    let mut columns = DMatrix::<C64>::zeros(REDUCED_DIM, 2);
    columns[(basis::INPUT1, 0)] = C64::new(1.0, 0.0);
    columns[(basis::INPUT2, 1)] = C64::new(1.0, 0.0);

    let mut done = 0usize;
    let mut cached: Option<(usize, Eigensystem)> = None;
    let eigen_for = |j: usize, cache: &mut Option<(usize, Eigensystem)>| -> Result<Eigensystem> {
        if let Some((k, e)) = cache.take() {
            if k == j {
                return Ok(e);
            }
        }
        Eigensystem::new(&path.step_hamiltonian(fixed, j))
    };

    let mut out = Vec::with_capacity(times.len());
    let mut last = 0.0;
    for &t in times {
        ensure_finite("t", t)?;
        if t < 0.0 || t < last {
            return Err(Error::invalid(
                "times",
                "must be non-negative and non-decreasing",
            ));
        }
        last = t;
        let (whole, rest) = split_time(t, dt);
        let needed = whole + usize::from(rest > 0.0);
        if needed > path.len() {
            return Err(Error::invalid(
                "path",
                format!("covers {} steps but t = {t} needs {needed}", path.len()),
            ));
        }
        while done < whole {
            let e = eigen_for(done, &mut cached)?;
            columns = e.apply(dt, &columns);
            done += 1;
        }
        let current = if rest > 0.0 {
            let e = eigen_for(done, &mut cached)?;
            let partial = e.apply(rest, &columns);
            cached = Some((done, e));
            partial
        } else {
            columns.clone()
        };
        out.push(avg_fidelity_from_block(block_from_columns(&current))?);
    }
    Ok(out)
}

fn block_from_columns(c: &DMatrix<C64>) -> RoutingBlock {
    use basis::*;
    RoutingBlock {
        target_from_input1: c[(TARGET, 0)],
        route_from_input2: c[(ROUTE, 1)],
        route_from_input1: c[(ROUTE, 0)],
        target_from_input2: c[(TARGET, 1)],
    }
}
