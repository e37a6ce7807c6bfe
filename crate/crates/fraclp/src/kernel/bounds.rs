//! Closed-form extrema of the kernel Fourier symbols. These are the
//! constants in the standing symbol bounds
//! `|φ̂_β(1, ξ)| ≤ C |ξ|^β` near ξ = 0 and `|ξ| |p̂(1, ξ)| ≤ C'` globally;
//! tests confirm them against derivative-free maximization.

use crate::error::{Error, Result};
use std::f64::consts::PI;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidParam {
            name: "alpha",
            value: alpha,
            reason: "stability index must lie in (0, 2]",
        });
    }
    Ok(())
}

/// `sup_{ξ≠0} φ̂_β(1, ξ) / |ξ|^β`. The ratio is `e^{-(2π)^α |ξ|^α}`,
/// strictly decreasing in |ξ|, so the supremum is 1, approached as ξ → 0.
pub fn low_frequency_ratio_sup(alpha: f64, beta: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidParam {
            name: "beta",
            value: beta,
            reason: "derivative order must be finite and >= 0",
        });
    }
    Ok(1.0)
}

/// Peak of `ρ ↦ ρ e^{-(2π)^α ρ^α}` (the weighted transition symbol):
/// maximizer `ρ* = ((2π)^α α)^{-1/α}`, value `ρ* e^{-1/α}`.
pub fn weighted_symbol_peak(alpha: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let c = (2.0 * PI).powf(alpha);
    let rho_star = (c * alpha).powf(-1.0 / alpha);
    Ok((rho_star, rho_star * (-1.0 / alpha).exp()))
}
