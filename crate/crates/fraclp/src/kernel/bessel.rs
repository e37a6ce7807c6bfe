//! Bessel functions of the first kind for the radial Fourier reduction.
//!
//! Two regimes: the Poisson integral representation below `z = 30` and the
//! Hankel large-argument expansion above. Tuned for the low orders that
//! appear in dimensions 2 and 3 (ν = 0 and ν = 1/2); accuracy degrades for
//! ν ≳ 3 near the switch point.

use crate::quad::integrate_panel;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

const SWITCH: f64 = 30.0;

/// `J_ν(z)` for ν ≥ 0, z ≥ 0.
pub fn bessel_j(nu: f64, z: f64) -> f64 {
    assert!(nu >= 0.0 && z >= 0.0, "bessel_j domain");
    if z <= SWITCH {
        poisson(nu, z)
    } else {
        asymptotic(nu, z)
    }
}

/// Poisson integral
/// `J_ν(z) = (z/2)^ν / (Γ(ν+1/2) Γ(1/2)) ∫_0^π cos(z cos θ) sin^{2ν}θ dθ`.
fn poisson(nu: f64, z: f64) -> f64 {
    let pref = (0.5 * z).powf(nu) / (gamma(nu + 0.5) * PI.sqrt());
    if pref == 0.0 {
        return 0.0;
    }
    // Phase z·cosθ varies by 2z over the range; ~1 radian per panel.
    let panels = (z.ceil() as usize).max(4) * 2;
    let mut s = 0.0;
    let mut f = |th: f64| (z * th.cos()).cos() * th.sin().powf(2.0 * nu);
    for p in 0..panels {
        let a = PI * p as f64 / panels as f64;
        let b = PI * (p + 1) as f64 / panels as f64;
        s += integrate_panel(&mut f, a, b, 12);
    }
    pref * s
}

/// Hankel expansion `√(2/(πz)) [P cos ω - Q sin ω]`, `ω = z - (ν/2 + 1/4)π`,
/// with terms through `(8z)^{-7}`.
fn asymptotic(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut a = [0.0f64; 8];
    a[0] = 1.0;
    for k in 1..8 {
        let j = (2 * k - 1) as f64;
        a[k] = a[k - 1] * (mu - j * j) / (k as f64 * 8.0 * z);
    }
    let p = a[0] - a[2] + a[4] - a[6];
    let q = a[1] - a[3] + a[5] - a[7];
    let omega = z - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (p * omega.cos() - q * omega.sin())
}
