//! Von Mises density and the modified Bessel function `I0` it is normalized by.

use std::f64::consts::{PI, TAU};

use crate::error::{ensure_finite, Error, Result};

/// Below this argument `I0` is summed from its power series, above it the
/// asymptotic expansion is used.
const SERIES_LIMIT: f64 = 15.0;

/// Exponentially scaled Bessel function `e^{-|x|} I0(x)`.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        // sum_m ((x/2)^m / m!)^2
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut m = 1.0;
        loop {
            term *= q / (m * m);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
            m += 1.0;
        }
        sum * (-x).exp()
    } else {
        // 1/sqrt(2 pi x) * sum_j ((2j-1)!!)^2 / (j! (8x)^j), truncated at the smallest term.
        let mut term = 1.0_f64;
        let mut sum = 1.0;
        let mut j = 1.0_f64;
        loop {
            let next = term * (2.0 * j - 1.0).powi(2) / (8.0 * x * j);
            if next >= term || next < sum * 1e-17 {
                break;
            }
            term = next;
            sum += term;
            j += 1.0;
        }
        sum / (TAU * x).sqrt()
    }
}

/// Modified Bessel function of the first kind, order zero. Overflows to
/// infinity past `x ~ 713`; use [`bessel_i0_scaled`] there.
pub fn bessel_i0(x: f64) -> f64 {
    bessel_i0_scaled(x) * x.abs().exp()
}

/// `e^{k cos(eps)} / (2 pi I0(k))`, evaluated in scaled form so large `k` does not overflow.
pub fn von_mises_pdf(eps: f64, k: f64) -> Result<f64> {
    ensure_finite("eps", eps)?;
    ensure_finite("k", k)?;
    if k < 0.0 {
        return Err(Error::invalid("k", "concentration must be non-negative"));
    }
    Ok((k * (eps.cos() - 1.0)).exp() / (2.0 * PI * bessel_i0_scaled(k)))
}
