//! Sampling oracles for the quadrature averages, OU statistics and Trotter order.

mod common;

use std::f64::consts::PI;

use common::{exact_fidelity, haar_unitary, mean_stderr, von_mises_sample};
use lily_router::dynamics::{
    hermitian_expm, trotter_evolve, trotter_fidelity_series, Eigensystem, ParameterPath,
    PathSamples, DEFAULT_DT,
};
use lily_router::experiments::{fidelity_curve, Scenario, TimeGrid};
use lily_router::fidelity::{
    avg_fidelity_closed, avg_fidelity_from_block, routing_fidelity, BlochAngles,
};
use lily_router::graph::{build_reduced_hamiltonian, ReducedParams, OPTIMAL_BETA};
use lily_router::noise::{
    ou_path, ou_phase_avg_fidelity, ou_weight_avg_fidelity, static_phase_avg_fidelity,
    static_weight_avg_fidelity, NoiseSpec, OuParams, SeedLineage, DEFAULT_HERMITE_NODES,
    DEFAULT_PHASE_GRID,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const SAMPLES: usize = 100_000;

#[test]
fn von_mises_sampler_has_the_right_mean_cosine() {
    // E[cos eps] = I1(4)/I0(4)
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let xs: Vec<f64> = (0..SAMPLES)
        .map(|_| von_mises_sample(&mut rng, 4.0).cos())
        .collect();
    let (m, se) = mean_stderr(&xs);
    assert!((m - 0.863_522_611_024_550_4).abs() < 3.0 * se, "{m} ± {se}");
}

#[test]
fn static_phase_matches_sampling_at_pi() {
    let k = 4.0;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let xs: Vec<f64> = (0..SAMPLES)
        .map(|_| {
            let e1 = von_mises_sample(&mut rng, k);
            let e2 = von_mises_sample(&mut rng, k);
            exact_fidelity(2, PI, OPTIMAL_BETA, e1, PI + e2)
        })
        .collect();
    let (m, se) = mean_stderr(&xs);
    let q = static_phase_avg_fidelity(2, PI, k, DEFAULT_PHASE_GRID).unwrap();
    assert!(
        (q - m).abs() < 3.0 * se,
        "quadrature {q}, sampling {m} ± {se}"
    );
}

#[test]
fn static_phase_curve_matches_sampling_pointwise() {
    let k = 4.0;
    let scenario = Scenario::new(Some(NoiseSpec::StaticPhase { k }), 2)
        .with_time_grid(TimeGrid::new(4.0 * PI, 9));
    let curve = fidelity_curve(&scenario).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut per_time = vec![Vec::with_capacity(SAMPLES / 2); curve.len()];
    for _ in 0..SAMPLES / 2 {
        let e1 = von_mises_sample(&mut rng, k);
        let e2 = von_mises_sample(&mut rng, k);
        let h = build_reduced_hamiltonian(2, OPTIMAL_BETA, e1, PI + e2).unwrap();
        let eig = Eigensystem::new(&h).unwrap();
        for (slot, &t) in per_time.iter_mut().zip(&curve.times) {
            slot.push(avg_fidelity_from_block(eig.routing_block(t)).unwrap());
        }
    }
    for (i, xs) in per_time.iter().enumerate().skip(1) {
        let (m, se) = mean_stderr(xs);
        let q = curve.mean_fidelity[i];
        assert!(
            (q - m).abs() < 3.0 * se,
            "t={}: quadrature {q}, sampling {m} ± {se}",
            curve.times[i]
        );
    }
}

#[test]
fn static_weight_matches_sampling() {
    let sigma = 0.2;
    let normal = Normal::new(0.0, sigma).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let xs: Vec<f64> = (0..SAMPLES)
        .map(|_| exact_fidelity(2, PI, OPTIMAL_BETA + normal.sample(&mut rng), 0.0, PI))
        .collect();
    let (m, se) = mean_stderr(&xs);
    let q = static_weight_avg_fidelity(2, PI, sigma, DEFAULT_HERMITE_NODES).unwrap();
    assert!(
        (q - m).abs() < 3.0 * se,
        "quadrature {q}, sampling {m} ± {se}"
    );
}

#[test]
fn closed_form_average_matches_bloch_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let u = haar_unitary(&mut rng, 7);
        let xs: Vec<f64> = (0..SAMPLES)
            .map(|_| routing_fidelity(&u, &BlochAngles::sample(&mut rng)).unwrap())
            .collect();
        let (m, se) = mean_stderr(&xs);
        let closed = avg_fidelity_closed(&u).unwrap();
        assert!(
            (closed - m).abs() < 3.0 * se,
            "closed {closed}, sampling {m} ± {se}"
        );
    }
}

#[test]
fn ou_pooled_variance_is_stationary() {
    let p = OuParams::new(1.0, 0.0, 1.0).unwrap();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut count = 0.0;
    for r in 0..10_000 {
        let path = ou_path(&p, DEFAULT_DT, 400, SeedLineage::new(11, r, 0)).unwrap();
        for x in path.samples {
            sum += x;
            sum_sq += x * x;
            count += 1.0;
        }
    }
    let mean = sum / count;
    let var = sum_sq / count - mean * mean;
    assert!((var - 0.5).abs() < 0.025, "pooled variance {var}");
}

#[test]
fn ou_lag_one_autocorrelation() {
    let theta = 1.0;
    let dt = 0.01;
    let p = OuParams::new(theta, 0.3, 0.7).unwrap();
    let x = ou_path(&p, dt, 1_000_000, SeedLineage::new(12, 0, 0))
        .unwrap()
        .samples;
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let c0: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    let c1: f64 = x.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
    let rho = c1 / c0;
    let expected = (-theta * dt).exp();
    // Bartlett: var(rho_hat) ~ (1 - rho^2) / N for an AR(1) process.
    let se = ((1.0 - expected * expected) / x.len() as f64).sqrt();
    assert!(
        (rho - expected).abs() < 3.0 * se,
        "rho {rho}, expected {expected} ± {se}"
    );
}

#[test]
fn trotter_error_is_first_order() {
    let fixed = ReducedParams::optimal(3);
    let beta = |t: f64| OPTIMAL_BETA + 0.3 * (2.0 * t).sin();
    let t_end = 2.0;
    let evolve = |steps: usize| {
        let dt = t_end / steps as f64;
        let samples = (0..steps).map(|j| beta(j as f64 * dt)).collect();
        trotter_evolve(
            &fixed,
            &ParameterPath::new(dt, PathSamples::Weight(samples)).unwrap(),
        )
        .unwrap()
    };
    let reference = evolve(1 << 16);
    let err = |steps: usize| {
        (evolve(steps).matrix() - reference.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    };
    let (e1, e2, e3) = (err(100), err(200), err(400));
    for ratio in [e1 / e2, e2 / e3] {
        assert!((1.5..=2.5).contains(&ratio), "errors {e1} {e2} {e3}");
    }
}

#[test]
fn trotter_series_with_constant_path_is_exact() {
    let fixed = ReducedParams::optimal(4);
    let p = ReducedParams { beta: 0.7, ..fixed };
    let path = ParameterPath::new(0.05, PathSamples::Weight(vec![0.7; 80])).unwrap();
    let times = [0.0, 0.3, 1.01, 2.5, 4.0];
    let series = trotter_fidelity_series(&fixed, &path, &times).unwrap();
    let h = p.hamiltonian().unwrap();
    for (&t, f) in times.iter().zip(series) {
        let exact = avg_fidelity_closed(&hermitian_expm(&h, t).unwrap()).unwrap();
        assert!((exact - f).abs() < 1e-10, "t={t}");
    }
}

#[test]
fn ou_phase_self_convergence() {
    let coarse = ou_phase_avg_fidelity(2, PI, 1.0, 0.8, DEFAULT_DT, 2000, 21).unwrap();
    let fine = ou_phase_avg_fidelity(2, PI, 1.0, 0.8, DEFAULT_DT / 2.0, 4000, 22).unwrap();
    let se = coarse.stderr.hypot(fine.stderr);
    assert!(
        (coarse.mean - fine.mean).abs() < 3.0 * se,
        "{coarse:?} vs {fine:?}"
    );
}

#[test]
fn ou_weight_is_output_count_independent() {
    let a = ou_weight_avg_fidelity(2, 3.0, 1.0, 0.4, DEFAULT_DT, 200, 9).unwrap();
    let b = ou_weight_avg_fidelity(10, 3.0, 1.0, 0.4, DEFAULT_DT, 200, 9).unwrap();
    assert!((a.mean - b.mean).abs() < 3.0 * a.stderr.hypot(b.stderr));
    assert!((a.mean - b.mean).abs() < 1e-9);
}

#[test]
fn fidelity_at_pi_decreases_with_noise_strength() {
    let sigmas = [0.1, 0.3, 0.5, 0.7, 1.0];
    let check = |name: &str, values: &[(f64, f64)]| {
        for w in values.windows(2) {
            assert!(
                w[1].0 <= w[0].0 + w[0].1.hypot(w[1].1),
                "{name}: {values:?}"
            );
        }
    };
    let phase: Vec<(f64, f64)> = sigmas
        .iter()
        .map(|s| {
            (
                static_phase_avg_fidelity(10, PI, 1.0 / (s * s), DEFAULT_PHASE_GRID).unwrap(),
                0.0,
            )
        })
        .collect();
    check("static-phase", &phase);
    let weight: Vec<(f64, f64)> = sigmas
        .iter()
        .map(|&s| {
            (
                static_weight_avg_fidelity(2, PI, s, DEFAULT_HERMITE_NODES).unwrap(),
                0.0,
            )
        })
        .collect();
    check("static-weight", &weight);
    let ou = |f: fn(
        usize,
        f64,
        f64,
        f64,
        f64,
        usize,
        u64,
    ) -> lily_router::Result<lily_router::EnsembleEstimate>| {
        sigmas
            .iter()
            .map(|s| {
                let e = f(2, PI, 1.0, s * 2f64.sqrt(), DEFAULT_DT, 500, 17).unwrap();
                (e.mean, e.stderr)
            })
            .collect::<Vec<_>>()
    };
    check("ou-phase", &ou(ou_phase_avg_fidelity));
    check("ou-weight", &ou(ou_weight_avg_fidelity));
}

#[test]
fn alternating_phase_path_agrees_with_refined_steps() {
    let fixed = ReducedParams::optimal(2);
    let dt = 0.05;
    let steps = 63;
    let coarse: Vec<(f64, f64)> = (0..steps)
        .map(|j| (if j % 2 == 0 { 0.1 } else { -0.1 }, PI))
        .collect();
    let fine: Vec<(f64, f64)> = coarse
        .iter()
        .flat_map(|&s| std::iter::repeat(s).take(10))
        .collect();
    let u = trotter_evolve(
        &fixed,
        &ParameterPath::new(dt, PathSamples::Phases(coarse)).unwrap(),
    )
    .unwrap();
    let v = trotter_evolve(
        &fixed,
        &ParameterPath::new(dt / 10.0, PathSamples::Phases(fine)).unwrap(),
    )
    .unwrap();
    let (fu, fv) = (
        avg_fidelity_closed(&u).unwrap(),
        avg_fidelity_closed(&v).unwrap(),
    );
    assert!((fu - fv).abs() < 1e-4, "{fu} vs {fv}");
    assert!(u.unitarity_deviation() < 1e-8 && v.unitarity_deviation() < 1e-8);
}
