//! Power-law diagnostics for kernel tails: log-log least-squares fits and
//! weighted suprema used to certify `|φ_β(1, x)| ≤ C |x|^{-(d+e)}` bounds.

use crate::error::{Error, Result};
use crate::sum::linear_fit;

/// Result of fitting `v ≈ amplitude · r^{-exponent}`.
#[derive(Debug, Clone, Copy)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub r_squared: f64,
}

/// Least-squares fit on log-log axes; radii must be increasing and the
/// values strictly positive.
pub fn fit_power_law(radii: &[f64], values: &[f64]) -> Result<PowerLawFit> {
    if radii.len() < 3 {
        return Err(Error::EmptyInput("power-law fit needs at least 3 samples"));
    }
    if radii.len() != values.len() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} values", radii.len()),
            got: format!("{}", values.len()),
        });
    }
    let mut xs = Vec::with_capacity(radii.len());
    let mut ys = Vec::with_capacity(radii.len());
    for (i, (&r, &v)) in radii.iter().zip(values.iter()).enumerate() {
        if !(r.is_finite() && r > 0.0) || (i > 0 && r <= radii[i - 1]) {
            return Err(Error::InvalidParam {
                name: "radii",
                value: r,
                reason: "must be finite, positive, strictly increasing",
            });
        }
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParam {
                name: "values",
                value: v,
                reason: "power-law fit needs strictly positive values",
            });
        }
        xs.push(r.ln());
        ys.push(v.ln());
    }
    let (slope, intercept, r_squared) = linear_fit(&xs, &ys);
    Ok(PowerLawFit {
        exponent: -slope,
        amplitude: intercept.exp(),
        r_squared,
    })
}

/// `sup_i |v_i| r_i^p` — the certified constant in a bound `|v| ≤ C r^{-p}`.
pub fn weighted_sup(radii: &[f64], values: &[f64], p: f64) -> Result<f64> {
    if radii.is_empty() || radii.len() != values.len() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} values", radii.len()),
            got: format!("{}", values.len()),
        });
    }
    let mut sup = 0.0f64;
    for (&r, &v) in radii.iter().zip(values.iter()) {
        if !(r.is_finite() && r > 0.0 && v.is_finite()) {
            return Err(Error::NonFinite {
                context: "weighted supremum",
            });
        }
        sup = sup.max(v.abs() * r.powf(p));
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let radii: Vec<f64> = (1..30).map(|i| 1.5f64.powi(i)).collect();
        let values: Vec<f64> = radii.iter().map(|r| 0.37 * r.powf(-2.5)).collect();
        let fit = fit_power_law(&radii, &values).unwrap();
        assert!((fit.exponent - 2.5).abs() < 1e-12);
        assert!((fit.amplitude - 0.37).abs() < 1e-12);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn weighted_sup_on_exact_law_is_the_amplitude() {
        let radii: Vec<f64> = (1..20).map(|i| 2.0f64.powi(i)).collect();
        let values: Vec<f64> = radii.iter().map(|r| 0.8 * r.powf(-1.5)).collect();
        let sup = weighted_sup(&radii, &values, 1.5).unwrap();
        assert!((sup - 0.8).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_power_law(&[1.0, 2.0], &[1.0, 0.5]).is_err());
        assert!(fit_power_law(&[1.0, 2.0, 1.5], &[1.0, 0.5, 0.7]).is_err());
        assert!(fit_power_law(&[1.0, 2.0, 3.0], &[1.0, -0.5, 0.7]).is_err());
        assert!(weighted_sup(&[1.0], &[1.0, 2.0], 1.0).is_err());
    }
}
