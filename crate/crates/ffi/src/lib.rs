//! C interface to `lily_router`.
//!
//! Every function returns a [`LilyStatus`]; results travel through out-pointers.
//! Scenarios and curves are opaque heap handles released with their `_free`
//! function. After a non-OK status, [`lily_last_error_message`] describes the
//! failure on the calling thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lily_router::dynamics::Eigensystem;
use lily_router::experiments::{
    fidelity_curve, peak_scan, resource_counts, FidelityCurve, Scenario, TimeGrid,
};
use lily_router::fidelity::avg_fidelity_from_block;
use lily_router::graph::{
    build_reduced_hamiltonian, OPTIMAL_BETA, OPTIMAL_DELTA, OPTIMAL_GAMMA, REDUCED_DIM,
};
use lily_router::{Error, NoiseSpec};

/// Outcome of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LilyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericFailure = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Opaque scenario handle.
pub struct LilyScenario {
    inner: Scenario,
}

/// Opaque computed-curve handle.
pub struct LilyCurve {
    inner: FidelityCurve,
}

/// Peak of a curve inside a time window.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LilyPeak {
    pub t_peak: f64,
    pub f_peak: f64,
    pub sigma_eff: f64,
    pub n: usize,
    /// Non-zero when the curve is flat over the window.
    pub flat: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn classify(err: &Error) -> LilyStatus {
    match err {
        Error::TooFewOutputs(_)
        | Error::NonFinite { .. }
        | Error::InvalidParameter { .. }
        | Error::NotHermitian { .. }
        | Error::DimensionMismatch { .. }
        | Error::EmptyWindow { .. } => LilyStatus::InvalidArgument,
        _ => LilyStatus::NumericFailure,
    }
}

/// Runs `body`, converting library errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), LilyStatus>) -> LilyStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            LilyStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            LilyStatus::Panic
        }
    }
}

fn lib<T>(r: lily_router::Result<T>) -> Result<T, LilyStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        classify(&e)
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), LilyStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        Err(LilyStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lily_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message (NUL-terminated, truncated
/// to `capacity`) into `buffer` and stores the untruncated length in `needed`.
#[no_mangle]
pub unsafe extern "C" fn lily_last_error_message(
    buffer: *mut c_char,
    capacity: usize,
    needed: *mut usize,
) -> LilyStatus {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !needed.is_null() {
            *needed = bytes.len() + 1;
        }
        if buffer.is_null() || capacity == 0 {
            return if bytes.is_empty() {
                LilyStatus::Ok
            } else {
                LilyStatus::BufferTooSmall
            };
        }
        let count = bytes.len().min(capacity - 1);
        ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buffer, count);
        *buffer.add(count) = 0;
        if count < bytes.len() {
            LilyStatus::BufferTooSmall
        } else {
            LilyStatus::Ok
        }
    })
}

/// Writes the 7x7 reduced Hamiltonian in row-major order into `re` and `im`
/// (49 doubles each).
#[no_mangle]
pub unsafe extern "C" fn lily_reduced_hamiltonian(
    n: usize,
    beta: f64,
    gamma: f64,
    delta: f64,
    re: *mut f64,
    im: *mut f64,
) -> LilyStatus {
    guard(|| {
        non_null(re, "re")?;
        non_null(im, "im")?;
        let h = lib(build_reduced_hamiltonian(n, beta, gamma, delta))?;
        for r in 0..REDUCED_DIM {
            for c in 0..REDUCED_DIM {
                let z = h.get(r, c);
                *re.add(r * REDUCED_DIM + c) = z.re;
                *im.add(r * REDUCED_DIM + c) = z.im;
            }
        }
        Ok(())
    })
}

/// Bloch-averaged routing fidelity of the exact evolution at `(beta, gamma, delta)` and time `t`.
#[no_mangle]
pub unsafe extern "C" fn lily_fidelity(
    n: usize,
    beta: f64,
    gamma: f64,
    delta: f64,
    t: f64,
    out: *mut f64,
) -> LilyStatus {
    guard(|| {
        non_null(out, "out")?;
        if !t.is_finite() {
            set_error("t must be finite");
            return Err(LilyStatus::InvalidArgument);
        }
        let h = lib(build_reduced_hamiltonian(n, beta, gamma, delta))?;
        let eig = lib(Eigensystem::new(&h))?;
        *out = lib(avg_fidelity_from_block(eig.routing_block(t)))?;
        Ok(())
    })
}

/// Noiseless fidelity at the optimal parameters.
#[no_mangle]
pub unsafe extern "C" fn lily_noiseless_fidelity(n: usize, t: f64, out: *mut f64) -> LilyStatus {
    lily_fidelity(n, OPTIMAL_BETA, OPTIMAL_GAMMA, OPTIMAL_DELTA, t, out)
}

/// `R_QST = d (n^2 + n)`, `R_QR = d (n + 1) + 2`.
#[no_mangle]
pub unsafe extern "C" fn lily_resource_counts(
    n: u64,
    d: u64,
    r_qst: *mut u64,
    r_qr: *mut u64,
) -> LilyStatus {
    guard(|| {
        non_null(r_qst, "r_qst")?;
        non_null(r_qr, "r_qr")?;
        let (a, b) = lib(resource_counts(n, d))?;
        *r_qst = a;
        *r_qr = b;
        Ok(())
    })
}

unsafe fn new_scenario(
    noise: Option<NoiseSpec>,
    n: usize,
    out: *mut *mut LilyScenario,
) -> LilyStatus {
    guard(|| {
        non_null(out, "out")?;
        let inner = Scenario::new(noise, n);
        lib(inner.validate())?;
        *out = Box::into_raw(Box::new(LilyScenario { inner }));
        Ok(())
    })
}

/// Noiseless scenario with default grid and numerics.
#[no_mangle]
pub unsafe extern "C" fn lily_scenario_noiseless(
    n: usize,
    out: *mut *mut LilyScenario,
) -> LilyStatus {
    new_scenario(None, n, out)
}

/// Static von Mises phase noise with concentration `k`.
#[no_mangle]
pub unsafe extern "C" fn lily_scenario_static_phase(
    n: usize,
    k: f64,
    out: *mut *mut LilyScenario,
) -> LilyStatus {
    new_scenario(Some(NoiseSpec::StaticPhase { k }), n, out)
}

/// Static Gaussian weight noise with standard deviation `sigma`.
#[no_mangle]
pub unsafe extern "C" fn lily_scenario_static_weight(
    n: usize,
    sigma: f64,
    out: *mut *mut LilyScenario,
) -> LilyStatus {
    new_scenario(Some(NoiseSpec::StaticWeight { sigma }), n, out)
}

/// Ornstein-Uhlenbeck phase noise.
#[no_mangle]
pub unsafe extern "C" fn lily_scenario_ou_phase(
    n: usize,
    theta: f64,
    volatility: f64,
    out: *mut *mut LilyScenario,
) -> LilyStatus {
    new_scenario(Some(NoiseSpec::OuPhase { theta, volatility }), n, out)
}

/// Ornstein-Uhlenbeck weight noise.
#[no_mangle]
pub unsafe extern "C" fn lily_scenario_ou_weight(
    n: usize,
    theta: f64,
    volatility: f64,
    out: *mut *mut LilyScenario,
) -> LilyStatus {
    new_scenario(Some(NoiseSpec::OuWeight { theta, volatility }), n, out)
}

/// Replaces the time grid with `points` samples over `[t_min, t_max]`.
/// The scenario is left unchanged on error.
#[no_mangle]
pub unsafe extern "C" fn lily_scenario_set_time_grid(
    scenario: *mut LilyScenario,
    t_min: f64,
    t_max: f64,
    points: usize,
) -> LilyStatus {
    guard(|| {
        non_null(scenario, "scenario")?;
        let s = &mut (*scenario).inner;
        let updated = s.with_time_grid(TimeGrid {
            t_min,
            t_max,
            points,
        });
        lib(updated.validate())?;
        *s = updated;
        Ok(())
    })
}

/// Replaces the numeric settings. The scenario is left unchanged on error.
#[no_mangle]
pub unsafe extern "C" fn lily_scenario_set_numerics(
    scenario: *mut LilyScenario,
    phase_grid: usize,
    hermite_nodes: usize,
    dt: f64,
    realizations: usize,
    master_seed: u64,
) -> LilyStatus {
    guard(|| {
        non_null(scenario, "scenario")?;
        let s = &mut (*scenario).inner;
        let mut updated = *s;
        updated.numerics.phase_grid = phase_grid;
        updated.numerics.hermite_nodes = hermite_nodes;
        updated.numerics.dt = dt;
        updated.numerics.realizations = realizations;
        updated.numerics.master_seed = master_seed;
        lib(updated.validate())?;
        *s = updated;
        Ok(())
    })
}

/// Releases a scenario. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lily_scenario_free(scenario: *mut LilyScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Computes the scenario's fidelity curve.
#[no_mangle]
pub unsafe extern "C" fn lily_curve_compute(
    scenario: *const LilyScenario,
    out: *mut *mut LilyCurve,
) -> LilyStatus {
    guard(|| {
        non_null(scenario, "scenario")?;
        non_null(out, "out")?;
        let inner = lib(fidelity_curve(&(*scenario).inner))?;
        *out = Box::into_raw(Box::new(LilyCurve { inner }));
        Ok(())
    })
}

/// Number of time points.
#[no_mangle]
pub unsafe extern "C" fn lily_curve_len(curve: *const LilyCurve, out: *mut usize) -> LilyStatus {
    guard(|| {
        non_null(curve, "curve")?;
        non_null(out, "out")?;
        *out = (*curve).inner.len();
        Ok(())
    })
}

/// Copies the curve into caller buffers of length `capacity`. `stderr_out` may
/// be null; for deterministic models it is filled with NaN.
#[no_mangle]
pub unsafe extern "C" fn lily_curve_copy(
    curve: *const LilyCurve,
    times: *mut f64,
    mean_fidelity: *mut f64,
    stderr_out: *mut f64,
    capacity: usize,
) -> LilyStatus {
    guard(|| {
        non_null(curve, "curve")?;
        non_null(times, "times")?;
        non_null(mean_fidelity, "mean_fidelity")?;
        let c = &(*curve).inner;
        if capacity < c.len() {
            set_error(format!(
                "buffers hold {capacity} values, curve has {}",
                c.len()
            ));
            return Err(LilyStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(c.times.as_ptr(), times, c.len());
        ptr::copy_nonoverlapping(c.mean_fidelity.as_ptr(), mean_fidelity, c.len());
        if !stderr_out.is_null() {
            match &c.stderr {
                Some(e) => ptr::copy_nonoverlapping(e.as_ptr(), stderr_out, c.len()),
                None => (0..c.len()).for_each(|i| *stderr_out.add(i) = f64::NAN),
            }
        }
        Ok(())
    })
}

/// Peak inside `[t_lo, t_hi]` with quadratic refinement.
#[no_mangle]
pub unsafe extern "C" fn lily_curve_peak(
    curve: *const LilyCurve,
    t_lo: f64,
    t_hi: f64,
    out: *mut LilyPeak,
) -> LilyStatus {
    guard(|| {
        non_null(curve, "curve")?;
        non_null(out, "out")?;
        let p = lib(peak_scan(&(*curve).inner, (t_lo, t_hi)))?;
        *out = LilyPeak {
            t_peak: p.t_peak,
            f_peak: p.f_peak,
            sigma_eff: p.sigma_eff,
            n: p.n,
            flat: u8::from(p.flat),
        };
        Ok(())
    })
}

/// Releases a curve. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lily_curve_free(curve: *mut LilyCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}
