use std::f64::consts::PI;
use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use lily_router_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    let mut needed = 0usize;
    unsafe { lily_last_error_message(buf.as_mut_ptr(), buf.len(), &mut needed) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(lily_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn reduced_hamiltonian_layout() {
    let mut re = [0.0; 49];
    let mut im = [0.0; 49];
    let s = unsafe {
        lily_reduced_hamiltonian(
            2,
            3f64.sqrt() / 2.0,
            0.0,
            PI,
            re.as_mut_ptr(),
            im.as_mut_ptr(),
        )
    };
    assert_eq!(s, LilyStatus::Ok);
    assert_eq!(re[1], 1.0);
    assert!((re[7 + 2] - 3f64.sqrt() / 2.0 * 2f64.sqrt()).abs() < 1e-15);
    assert!((re[2 * 7 + 3] - 3f64.sqrt() / 2.0 * 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(re[2 * 7 + 5], 0.0);
    for r in 0..7 {
        for c in 0..7 {
            assert_eq!(re[r * 7 + c], re[c * 7 + r]);
            assert_eq!(im[r * 7 + c], -im[c * 7 + r]);
        }
    }
}

#[test]
fn fidelity_entry_points() {
    let mut f = 0.0;
    assert_eq!(
        unsafe { lily_noiseless_fidelity(10, PI, &mut f) },
        LilyStatus::Ok
    );
    assert!((f - 1.0).abs() < 1e-9);
    assert_eq!(
        unsafe { lily_fidelity(5, 1.0, 0.3, 2.5, 1.7, &mut f) },
        LilyStatus::Ok
    );
    assert!((f - 0.133_250_252_912_042_7).abs() < 1e-12);
}

#[test]
fn errors_are_reported() {
    let mut f = 0.0;
    assert_eq!(
        unsafe { lily_noiseless_fidelity(1, PI, &mut f) },
        LilyStatus::InvalidArgument
    );
    assert!(last_error().contains('1'), "{}", last_error());
    assert_eq!(
        unsafe { lily_noiseless_fidelity(2, f64::NAN, &mut f) },
        LilyStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { lily_noiseless_fidelity(2, PI, ptr::null_mut()) },
        LilyStatus::NullPointer
    );
    assert!(last_error().contains("out"));
    let mut scenario = ptr::null_mut();
    assert_eq!(
        unsafe { lily_scenario_static_phase(2, -1.0, &mut scenario) },
        LilyStatus::InvalidArgument
    );
    assert!(scenario.is_null());
}

#[test]
fn last_error_truncates_and_reports_length() {
    let mut f = 0.0;
    unsafe { lily_noiseless_fidelity(1, PI, &mut f) };
    let mut needed = 0;
    let mut tiny = [0 as std::ffi::c_char; 4];
    let s = unsafe { lily_last_error_message(tiny.as_mut_ptr(), tiny.len(), &mut needed) };
    assert_eq!(s, LilyStatus::BufferTooSmall);
    assert!(needed > 4);
    assert_eq!(tiny[3], 0);
}

#[test]
fn resource_counts() {
    let (mut a, mut b) = (0, 0);
    assert_eq!(
        unsafe { lily_resource_counts(6, 3, &mut a, &mut b) },
        LilyStatus::Ok
    );
    assert_eq!((a, b), (126, 23));
    assert_eq!(
        unsafe { lily_resource_counts(0, 3, &mut a, &mut b) },
        LilyStatus::InvalidArgument
    );
}

#[test]
fn curve_lifecycle() {
    unsafe {
        let mut scenario = ptr::null_mut();
        assert_eq!(
            lily_scenario_static_weight(2, 0.2, &mut scenario),
            LilyStatus::Ok
        );
        assert_eq!(
            lily_scenario_set_time_grid(scenario, 2.6, 3.7, 45),
            LilyStatus::Ok
        );
        assert_eq!(
            lily_scenario_set_time_grid(scenario, 0.0, 1.0, 1),
            LilyStatus::InvalidArgument
        );

        let mut curve = ptr::null_mut();
        assert_eq!(lily_curve_compute(scenario, &mut curve), LilyStatus::Ok);
        let mut len = 0;
        assert_eq!(lily_curve_len(curve, &mut len), LilyStatus::Ok);
        assert_eq!(len, 45);

        let mut t = vec![0.0; len];
        let mut f = vec![0.0; len];
        let mut e = vec![0.0; len];
        assert_eq!(
            lily_curve_copy(
                curve,
                t.as_mut_ptr(),
                f.as_mut_ptr(),
                e.as_mut_ptr(),
                len - 1
            ),
            LilyStatus::BufferTooSmall
        );
        assert_eq!(
            lily_curve_copy(curve, t.as_mut_ptr(), f.as_mut_ptr(), e.as_mut_ptr(), len),
            LilyStatus::Ok
        );
        assert_eq!(t[0], 2.6);
        assert_eq!(t[44], 3.7);
        assert!(e.iter().all(|x| x.is_nan()));
        assert!(f.iter().all(|x| (0.0..=1.0).contains(x)));

        let mut peak = LilyPeak::default();
        assert_eq!(
            lily_curve_peak(curve, PI - 0.5, PI + 0.5, &mut peak),
            LilyStatus::Ok
        );
        assert!((peak.t_peak - PI).abs() < 0.3);
        assert_eq!(peak.n, 2);
        assert_eq!(peak.flat, 0);
        assert!((peak.sigma_eff - 0.2).abs() < 1e-15);
        assert_eq!(
            lily_curve_peak(curve, 10.0, 11.0, &mut peak),
            LilyStatus::InvalidArgument
        );

        lily_curve_free(curve);
        lily_scenario_free(scenario);
        lily_curve_free(ptr::null_mut());
        lily_scenario_free(ptr::null_mut());
    }
}

#[test]
fn monte_carlo_curves_carry_stderr_and_are_reproducible() {
    unsafe {
        let mut scenario = ptr::null_mut();
        assert_eq!(
            lily_scenario_ou_phase(3, 1.0, 0.5, &mut scenario),
            LilyStatus::Ok
        );
        assert_eq!(
            lily_scenario_set_time_grid(scenario, 0.0, 1.0, 5),
            LilyStatus::Ok
        );
        assert_eq!(
            lily_scenario_set_numerics(scenario, 129, 61, 0.01, 50, 3),
            LilyStatus::Ok
        );
        assert_eq!(
            lily_scenario_set_numerics(scenario, 129, 61, 0.01, 1, 3),
            LilyStatus::InvalidArgument
        );
        let run = || {
            let mut curve = ptr::null_mut();
            assert_eq!(lily_curve_compute(scenario, &mut curve), LilyStatus::Ok);
            let (mut f, mut e) = (vec![0.0; 5], vec![0.0; 5]);
            let mut t = vec![0.0; 5];
            assert_eq!(
                lily_curve_copy(curve, t.as_mut_ptr(), f.as_mut_ptr(), e.as_mut_ptr(), 5),
                LilyStatus::Ok
            );
            lily_curve_free(curve);
            (f, e)
        };
        let (f1, e1) = run();
        let (f2, e2) = run();
        assert_eq!(f1, f2);
        assert_eq!(e1, e2);
        assert!(e1[1..].iter().all(|x| x.is_finite() && *x >= 0.0));
        lily_scenario_free(scenario);
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <math.h>
#include "lily_router.h"

int main(void) {
    double f = 0.0;
    if (lily_noiseless_fidelity(2, M_PI, &f) != LILY_STATUS_OK || fabs(f - 1.0) > 1e-9) return 1;
    uint64_t qst = 0, qr = 0;
    if (lily_resource_counts(6, 3, &qst, &qr) != LILY_STATUS_OK || qst != 126 || qr != 23) return 2;
    LilyScenario *s = NULL;
    if (lily_scenario_static_phase(2, 4.0, &s) != LILY_STATUS_OK) return 3;
    if (lily_scenario_set_time_grid(s, 2.64, 3.64, 21) != LILY_STATUS_OK) return 4;
    LilyCurve *c = NULL;
    if (lily_curve_compute(s, &c) != LILY_STATUS_OK) return 5;
    LilyPeak p;
    if (lily_curve_peak(c, 2.64, 3.64, &p) != LILY_STATUS_OK) return 6;
    lily_curve_free(c);
    lily_scenario_free(s);
    if (lily_noiseless_fidelity(1, 1.0, &f) != LILY_STATUS_INVALID_ARGUMENT) return 7;
    char msg[128];
    size_t needed = 0;
    lily_last_error_message(msg, sizeof msg, &needed);
    printf("%s %.6f %s\n", lily_version(), p.f_peak, msg);
    return 0;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let target_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = target_dir.join("liblily_router_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile_dir();
    let src = dir.join("smoke.c");
    let exe = dir.join("smoke");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new(cc)
        .args(["-std=c11", "-D_DEFAULT_SOURCE", "-Wall", "-Werror", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(env!("CARGO_PKG_VERSION")), "{text}");
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lily-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
