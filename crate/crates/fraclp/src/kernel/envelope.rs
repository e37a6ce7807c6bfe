//! Radial majorant for the kernels and their gradients: a power-law tail
//! `N ρ^{-(d+e)}` glued C¹ at the knot `ρ₀ = 10^{-1/α}` to an exponential
//! cap `N 10^{(d+e)/α} e^{-(d+e)(10^{1/α} ρ - 1)}`. The envelope is radially
//! decreasing and integrable, which is what the square-function estimates
//! require of a kernel majorant; the decay order `e` is β for the
//! differentiated kernels and α for the transition kernel itself.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Envelope {
    pub d: usize,
    pub alpha: f64,
    /// Tail decay order e: the envelope falls off as ρ^{-(d+e)}.
    pub decay: f64,
    /// Overall amplitude N.
    pub n: f64,
}

impl Envelope {
    pub fn new(d: usize, alpha: f64, decay: f64, n: f64) -> Result<Self> {
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
        if !(decay.is_finite() && decay > 0.0) {
            return Err(Error::InvalidParam {
                name: "decay",
                value: decay,
                reason: "tail order must be finite and > 0",
            });
        }
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParam {
                name: "n",
                value: n,
                reason: "amplitude must be finite and > 0",
            });
        }
        Ok(Envelope { d, alpha, decay, n })
    }

    /// Unit-amplitude envelope.
    pub fn unit(d: usize, alpha: f64, decay: f64) -> Result<Self> {
        Envelope::new(d, alpha, decay, 1.0)
    }

    /// Glue point between the cap and the power tail.
    pub fn knot(&self) -> f64 {
        10f64.powf(-1.0 / self.alpha)
    }

    pub fn value(&self, rho: f64) -> f64 {
        assert!(rho >= 0.0, "envelope radius");
        let e = self.d as f64 + self.decay;
        let knot_inv = 10f64.powf(1.0 / self.alpha);
        if rho >= self.knot() {
            self.n * rho.powf(-e)
        } else {
            self.n * 10f64.powf(e / self.alpha) * (-e * (knot_inv * rho - 1.0)).exp()
        }
    }

    /// Analytic radial derivative (negative everywhere).
    pub fn derivative(&self, rho: f64) -> f64 {
        let e = self.d as f64 + self.decay;
        let knot_inv = 10f64.powf(1.0 / self.alpha);
        if rho >= self.knot() {
            -e * self.n * rho.powf(-e - 1.0)
        } else {
            -e * knot_inv * self.value(rho)
        }
    }

    /// Closed form for `(d+e) ∫_r^∞ φ̄(ρ) ρ^{d-1} dρ`, valid on the power
    /// branch `r ≥ ρ₀`: equals `((d+e)/e) N r^{-e}` with `e` the tail order.
    pub fn tail_mass(&self, r: f64) -> Result<f64> {
        if !(r.is_finite() && r >= self.knot()) {
            return Err(Error::InvalidParam {
                name: "r",
                value: r,
                reason: "tail mass closed form needs r at or beyond the knot",
            });
        }
        let e = self.decay;
        let de = self.d as f64 + e;
        Ok(de * self.n / e * r.powf(-e))
    }
}

/// The quantity the envelope must dominate at radius ρ:
/// `|φ(ρ)| + |φ'(ρ)| + ρ |φ'(ρ)|`.
pub fn envelope_load(value: f64, deriv: f64, rho: f64) -> f64 {
    value.abs() + deriv.abs() * (1.0 + rho)
}

/// Fit the amplitude N so that `N φ̄_unit` dominates the kernel and its
/// radial derivative (central differences, step ~ tol^{1/3}) at the given
/// radii. `beta > 0` selects tail order β, otherwise α.
pub fn fit<F: Fn(f64) -> Result<f64>>(
    d: usize,
    alpha: f64,
    beta: f64,
    radii: &[f64],
    f: F,
) -> Result<Envelope> {
    if radii.is_empty() {
        return Err(Error::EmptyInput("radii"));
    }
    let decay = if beta > 0.0 { beta } else { alpha };
    let unit = Envelope::unit(d, alpha, decay)?;
    let mut n = 0.0f64;
    for &rho in radii {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidParam {
                name: "rho",
                value: rho,
                reason: "fit radii must be finite and > 0",
            });
        }
        let h = rho.max(unit.knot()) * 5e-4;
        let v = f(rho)?;
        let dv = (f(rho + h)? - f((rho - h).max(0.0))?) / (rho + h - (rho - h).max(0.0));
        n = n.max(envelope_load(v, dv, rho) / unit.value(rho));
    }
    Envelope::new(d, alpha, decay, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_panel;

    #[test]
    fn branches_glue_c1_at_knot() {
        for (d, alpha, decay) in [(1usize, 0.5f64, 0.5f64), (1, 1.0, 0.5), (3, 1.5, 1.5)] {
            let env = Envelope::unit(d, alpha, decay).unwrap();
            let k = env.knot();
            let eps = 1e-9 * k;
            let (below, above) = (env.value(k - eps), env.value(k + eps));
            assert!((below - above).abs() < 1e-7 * above, "value jump at knot");
            let (db, da) = (env.derivative(k - eps), env.derivative(k + eps));
            assert!((db - da).abs() < 1e-6 * da.abs(), "derivative jump at knot");
            // Analytic derivative against central differences.
            for rho in [0.3 * k, k, 2.5 * k] {
                let h = 1e-6 * rho;
                let fd = (env.value(rho + h) - env.value(rho - h)) / (2.0 * h);
                assert!(
                    (fd - env.derivative(rho)).abs() < 1e-5 * env.derivative(rho).abs(),
                    "rho={rho}"
                );
            }
        }
    }

    #[test]
    fn pinned_example_values() {
        // d=1, α=1, tail order 0.5: knot at 0.1, φ̄(0.1) = 10^{3/2}.
        let env = Envelope::unit(1, 1.0, 0.5).unwrap();
        assert!((env.knot() - 0.1).abs() < 1e-15);
        assert!((env.value(0.1) - 31.622776601683793).abs() < 1e-10);
        assert!((env.derivative(0.1) + 474.34164902525694).abs() < 1e-9);
    }

    #[test]
    fn radially_decreasing() {
        let env = Envelope::unit(2, 1.0, 1.0).unwrap();
        for rho in [0.01, 0.05, 0.1, 0.7, 3.0, 50.0] {
            assert!(env.derivative(rho) < 0.0, "rho={rho}");
        }
    }

    #[test]
    fn tail_mass_against_quadrature() {
        // Substituting ρ = r w^{-1/e} makes the tail integrand constant, so
        // the quadrature check is exact and independent of the closed form.
        let env = Envelope::new(1, 1.0, 0.5, 2.3).unwrap();
        let r = 0.7f64;
        let e = env.decay;
        let de = env.d as f64 + e;
        let mut g = |w: f64| {
            let rho = r * w.powf(-1.0 / e);
            de * env.value(rho) * rho.powf(env.d as f64 - 1.0) * (r / e) * w.powf(-1.0 / e - 1.0)
        };
        let quad = integrate_panel(&mut g, 0.0, 1.0, 16);
        let want = env.tail_mass(r).unwrap();
        assert!((quad - want).abs() < 1e-8 * want, "{quad} vs {want}");
        assert!(env.tail_mass(0.01).is_err());
    }

    #[test]
    fn fit_dominates_a_scaled_copy() {
        let unit = Envelope::unit(1, 1.0, 0.5).unwrap();
        let radii: Vec<f64> = (1..40).map(|i| 0.05 * i as f64).collect();
        let env = fit(1, 1.0, 0.5, &radii, |rho| Ok(3.0 * unit.value(rho))).unwrap();
        assert!(env.n >= 3.0);
        for &rho in &radii {
            assert!(env.value(rho) >= 3.0 * unit.value(rho) * (1.0 - 1e-12));
        }
    }
}
