//! Rotated-ray contour evaluation of the one-dimensional kernels.
//!
//! Writing the kernel as `2 t^{β/α} Re ∫_0^∞ e^{ivx} v^β e^{-c t v^α} dv`
//! with `c = (2π)^α`, the ray is rotated to `v e^{iθ}` (legitimate for
//! `0 ≤ θ < min(π/2, π/(2α))`, where both the oscillatory factor and the
//! stable symbol keep decaying). The angle is chosen to minimize the total
//! phase along the truncated ray, which keeps the integrand nearly
//! non-oscillatory even deep in the kernel tail.

use super::{KernelPoint, TAIL_EXPONENT};
use crate::error::{Error, Result};
use crate::quad::integrate_panel_complex;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Decay along the rotated ray: `D(v) = r v sinθ + c v^α cos(αθ)`.
fn decay(v: f64, r: f64, theta: f64, c: f64, alpha: f64) -> f64 {
    r * v * theta.sin() + c * v.powf(alpha) * (alpha * theta).cos()
}

/// Smallest v with `D(v) = TAIL_EXPONENT` (D is strictly increasing).
fn ray_cutoff(r: f64, theta: f64, c: f64, alpha: f64) -> f64 {
    let mut hi = 1.0f64;
    while decay(hi, r, theta, c, alpha) < TAIL_EXPONENT {
        hi *= 2.0;
    }
    let mut lo = 0.0f64;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if decay(mid, r, theta, c, alpha) < TAIL_EXPONENT {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Evaluate `φ_β(t, r)` in dimension 1 for `α ∈ (0, 2)`.
pub fn eval(alpha: f64, beta: f64, t: f64, r: f64) -> Result<KernelPoint> {
    if !(alpha.is_finite() && alpha > 0.0 && alpha < 2.0) {
        return Err(Error::InvalidParam {
            name: "alpha",
            value: alpha,
            reason: "contour evaluation requires alpha in (0, 2); use the radial method at 2",
        });
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidParam {
            name: "beta",
            value: beta,
            reason: "derivative order must be finite and >= 0",
        });
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParam {
            name: "t",
            value: t,
            reason: "time must be finite and > 0",
        });
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidParam {
            name: "r",
            value: r,
            reason: "radius must be finite and >= 0",
        });
    }

    let c = (2.0 * PI).powf(alpha) * t;
    let pre = t.powf(beta / alpha);
    let theta_max = (0.5 * PI).min(0.5 * PI / alpha);

    // Pick the rotation angle with the smallest oscillation budget.
    let mut theta = 0.0;
    let mut v_max = 0.0;
    let mut best = f64::INFINITY;
    for i in 0..8 {
        let th = theta_max * i as f64 / 8.0;
        let vm = ray_cutoff(r, th, c, alpha);
        let budget = (1.0 + beta) * th
            + r * vm * th.cos()
            + c * vm.powf(alpha) * (alpha * th).sin().abs();
        if budget < best {
            best = budget;
            theta = th;
            v_max = vm;
        }
    }

    let (sin_t, cos_t) = theta.sin_cos();
    let (sin_at, cos_at) = (alpha * theta).sin_cos();
    // Integrand after the substitution v = u⁴, which makes the fractional
    // powers v^β and v^α smooth at the endpoint v = 0.
    let mut f = |u: f64| -> Complex64 {
        let v = u * u * u * u;
        let va = v.powf(alpha);
        let amp = v.powf(beta) * (-(r * v * sin_t + c * va * cos_at)).exp();
        let phase = (1.0 + beta) * theta + r * v * cos_t - c * va * sin_at;
        Complex64::from_polar(4.0 * u * u * u * amp, phase)
    };

    // Geometric ladder toward 0, each rung split so that neither the phase
    // nor the decay varies by more than a few units across a panel.
    let mut breaks = vec![0.0f64];
    for m in (0..=30).rev() {
        breaks.push(v_max * (0.5f64).powi(m));
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0f64;
    let mut panels_used = 0usize;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let dphase = r * cos_t * (b - a) + c * sin_at.abs() * (b.powf(alpha) - a.powf(alpha));
        let ddecay = decay(b, r, theta, c, alpha) - decay(a, r, theta, c, alpha);
        let splits = ((dphase / 1.5).ceil() as usize)
            .max((ddecay / 3.0).ceil() as usize)
            .max(1);
        panels_used += splits;
        if panels_used > 40_000 {
            return Err(Error::Unsupported(format!(
                "contour oscillation budget exceeded (alpha={alpha}, beta={beta}, t={t}, r={r})"
            )));
        }
        for s in 0..splits {
            let pa = a + (b - a) * s as f64 / splits as f64;
            let pb = a + (b - a) * (s + 1) as f64 / splits as f64;
            let (ua, ub) = (pa.powf(0.25), pb.powf(0.25));
            let coarse = integrate_panel_complex(&mut f, ua, ub, 12);
            let fine = integrate_panel_complex(&mut f, ua, ub, 24);
            total += fine;
            err += (coarse - fine).norm();
        }
    }

    // Laplace-type bound on the truncated tail: integrand magnitude at the
    // cutoff times the local decay length 1/D'(v_max).
    let dprime = r * sin_t + c * alpha * v_max.powf(alpha - 1.0) * cos_at;
    let tail = v_max.powf(beta) * (-TAIL_EXPONENT).exp() / dprime;

    let value = 2.0 * pre * total.re;
    let err_estimate = 2.0 * pre * (err + tail);
    if !value.is_finite() {
        return Err(Error::NonFinite {
            context: "contour kernel evaluation",
        });
    }
    Ok(KernelPoint {
        value,
        err_estimate,
    })
}
