//! Helpers shared by the integration test targets. Samplers here are written
//! independently of the library so they can serve as oracles.

#![allow(dead_code)]

use std::f64::consts::PI;

use lily_router::dynamics::hermitian_expm;
use lily_router::fidelity::avg_fidelity_closed;
use lily_router::graph::build_reduced_hamiltonian;
use lily_router::operator::{UnitaryOperator, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Bloch-averaged fidelity of the exact propagator at the given parameters.
pub fn exact_fidelity(n: usize, t: f64, beta: f64, gamma: f64, delta: f64) -> f64 {
    let h = build_reduced_hamiltonian(n, beta, gamma, delta).unwrap();
    avg_fidelity_closed(&hermitian_expm(&h, t).unwrap()).unwrap()
}

/// Best-Fisher rejection sampler for the von Mises law centred at zero.
pub fn von_mises_sample<R: Rng + ?Sized>(rng: &mut R, k: f64) -> f64 {
    let tau = 1.0 + (1.0 + 4.0 * k * k).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * k);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        let u3: f64 = rng.random();
        let z = (PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = k * (r - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let theta = f.clamp(-1.0, 1.0).acos();
            return if u3 > 0.5 { theta } else { -theta };
        }
    }
}

/// Haar-random unitary of dimension `dim` via QR of a complex Ginibre matrix
/// with the phases of `R`'s diagonal divided out.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> UnitaryOperator {
    let g = DMatrix::<C64>::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = d / d.norm();
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    UnitaryOperator::new(q, 1e-10).unwrap()
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
