//! Oscillatory quadrature of the radial Fourier reduction
//!
//! `φ_β(t, x) = (2π)^{d/2} t^{β/α} |x|^{1-d/2}
//!              ∫_0^∞ ρ^{β+d/2} e^{-(2π)^α t ρ^α} J_{d/2-1}(ρ|x|) dρ`,
//!
//! which in d = 1 is the plain cosine transform
//! `2 t^{β/α} ∫_0^∞ ρ^β e^{-(2π)^α t ρ^α} cos(ρ|x|) dρ`. Panels are cut at
//! every half-oscillation `kπ/r`, graded geometrically toward ρ = 0 (with a
//! `ρ = u⁴` substitution on the first panel to tame the fractional powers),
//! and split further where the stable symbol loses several e-folds.
//! Independent of the contour method, and the only direct method in d ≥ 2.

use super::bessel::bessel_j;
use super::{KernelPoint, TAIL_EXPONENT};
use crate::error::{Error, Result};
use crate::quad::integrate_panel;
use std::f64::consts::PI;

/// Evaluate `φ_β(t, r)` in dimension d; `r > 0` required for d ≥ 2.
pub fn eval(d: usize, alpha: f64, beta: f64, t: f64, r: f64) -> Result<KernelPoint> {
    if !(1..=3).contains(&d) {
        return Err(Error::InvalidParam {
            name: "d",
            value: d as f64,
            reason: "dimension must be 1, 2, or 3",
        });
    }
    if !(alpha.is_finite() && alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidParam {
            name: "alpha",
            value: alpha,
            reason: "stability index must lie in (0, 2]",
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
    let r_ok = r.is_finite() && if d == 1 { r >= 0.0 } else { r > 0.0 };
    if !r_ok {
        return Err(Error::InvalidParam {
            name: "r",
            value: r,
            reason: "radius must be finite and positive (>= 0 in dimension 1)",
        });
    }

    let ct = (2.0 * PI).powf(alpha) * t;
    let pre = t.powf(beta / alpha);
    let rho_max = (TAIL_EXPONENT / ct).powf(1.0 / alpha);
    let beta_eff = if d == 1 { beta } else { beta + 0.5 * d as f64 };
    let nu = 0.5 * d as f64 - 1.0;

    let mut f = |rho: f64| -> f64 {
        let amp = rho.powf(beta_eff) * (-ct * rho.powf(alpha)).exp();
        if d == 1 {
            amp * (rho * r).cos()
        } else {
            amp * bessel_j(nu, rho * r)
        }
    };

    // Breakpoints: geometric grading toward 0 plus every half-period of the
    // oscillation, so each panel carries at most π of phase.
    let mut raw = Vec::new();
    for m in (1..=25).rev() {
        raw.push(rho_max * (0.5f64).powi(m));
    }
    if r > 0.0 {
        let k_max = (rho_max * r / PI).floor() as usize;
        if k_max > 200_000 {
            return Err(Error::Unsupported(format!(
                "radial quadrature needs {k_max} oscillation panels \
                 (d={d}, alpha={alpha}, t={t}, r={r}); use the contour method"
            )));
        }
        for k in 1..=k_max {
            raw.push(PI * k as f64 / r);
        }
    }
    raw.sort_by(f64::total_cmp);
    let mut brk = vec![0.0f64];
    for x in raw {
        if x > brk.last().unwrap() + 1e-12 * rho_max && x < rho_max * (1.0 - 1e-12) {
            brk.push(x);
        }
    }
    brk.push(rho_max);

    let mut total = crate::sum::Accum::new();
    let mut err = 0.0f64;
    let mut first = true;
    for w in brk.windows(2) {
        let (a, b) = (w[0], w[1]);
        let ddecay = ct * (b.powf(alpha) - a.powf(alpha));
        let splits = ((ddecay / 3.0).ceil() as usize).max(1);
        for s in 0..splits {
            let pa = a + (b - a) * s as f64 / splits as f64;
            let pb = a + (b - a) * (s + 1) as f64 / splits as f64;
            let (coarse, fine) = if first {
                // u⁴ substitution on the panel touching ρ = 0.
                let (ua, ub) = (pa.powf(0.25), pb.powf(0.25));
                let mut g = |u: f64| 4.0 * u * u * u * f(u * u * u * u);
                (
                    integrate_panel(&mut g, ua, ub, 12),
                    integrate_panel(&mut g, ua, ub, 24),
                )
            } else {
                (
                    integrate_panel(&mut f, pa, pb, 10),
                    integrate_panel(&mut f, pa, pb, 20),
                )
            };
            first = false;
            total.add(fine);
            err += (coarse - fine).abs();
        }
    }

    // Laplace-type tail bound past the cutoff.
    let jbound = if d == 1 {
        1.0
    } else {
        (2.0 / (PI * rho_max * r)).sqrt().min(1.0)
    };
    let tail = rho_max.powf(beta_eff) * (-TAIL_EXPONENT).exp() * jbound
        / (ct * alpha * rho_max.powf(alpha - 1.0));

    let prefactor = if d == 1 {
        2.0 * pre
    } else {
        (2.0 * PI).powf(0.5 * d as f64) * pre * r.powf(1.0 - 0.5 * d as f64)
    };
    let value = prefactor * total.value();
    let err_estimate = prefactor.abs() * (err + tail);
    if !value.is_finite() {
        return Err(Error::NonFinite {
            context: "radial kernel evaluation",
        });
    }
    Ok(KernelPoint {
        value,
        err_estimate,
    })
}
