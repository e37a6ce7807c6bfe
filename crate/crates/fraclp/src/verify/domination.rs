//! Pointwise and norm-level domination checks: the sharp function of the
//! square function against the parabolic maximal function of the data, and
//! the Fefferman–Stein-style norm comparison against the sharp function.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{lp_norm_st, GridSpec, SpaceTimeScalar};
use crate::sqop::{
    dyadic_radii, dyadic_widths, maximal_t, maximal_x, sharp_function, square_function, PsiSpec,
    TimeQuadMesh,
};
use crate::sum;
use crate::verify::families::{sample_field, FamilyKind, FamilySpec};

/// Outcome of comparing `(G f)^♯` pointwise against `√(𝕄 |f|²)`.
#[derive(Debug, Clone)]
pub struct SharpDominationReport {
    /// Largest ratio over samples where the maximal function is resolvable.
    pub sup_ratio: f64,
    pub median_ratio: f64,
    /// Fraction of grid points excluded because the maximal function sits at
    /// the numerical floor there.
    pub masked_fraction: f64,
}

/// Sample a two-channel band-limited field, form its square function, and
/// compare the sharp function of the result against the square root of the
/// space-time maximal function of `|f|²` point by point. A bounded ratio is
/// the discrete face of the good-λ route to the `L^p` bounds.
pub fn pointwise_sharp_check(
    alpha: f64,
    nx: usize,
    nt: usize,
    seed: u64,
) -> Result<SharpDominationReport> {
    let spec = GridSpec::new(1, 2.0 * PI, nx, nt, 0.0, 2.0, 2)?;
    let fam = FamilySpec {
        kind: FamilyKind::RandomBandlimited,
        band: (0.5, 4.0),
        support: (0.1, 0.9),
    };
    let f = sample_field(&spec, &fam, seed)?;
    let psi = PsiSpec::PhiBeta { beta: 0.5 * alpha };
    let mesh = TimeQuadMesh::build(&spec, alpha, &psi)?;
    let g = square_function(&f, &psi, &mesh)?;

    let scales: Vec<f64> = dyadic_radii(&spec)
        .into_iter()
        .filter(|&r| r <= 0.5 * spec.l)
        .collect();
    let sharp = sharp_function(&g, alpha, &scales)?;

    let dens = maximal_t(&maximal_x(&f.channel_sq(), &dyadic_radii(&spec))?, &dyadic_widths(&spec))?;

    let d_max = dens.values.iter().cloned().fold(0.0f64, f64::max);
    if d_max == 0.0 {
        return Err(Error::EmptyInput("field is identically zero"));
    }
    let floor = 1e-10 * d_max;
    let mut ratios = Vec::with_capacity(sharp.values.len());
    let mut masked = 0usize;
    for (&s, &d) in sharp.values.iter().zip(dens.values.iter()) {
        if d < floor {
            masked += 1;
        } else {
            ratios.push(s / d.sqrt());
        }
    }
    if ratios.is_empty() {
        return Err(Error::Unsupported(
            "maximal function at the numerical floor everywhere".into(),
        ));
    }
    Ok(SharpDominationReport {
        sup_ratio: sum::quantile(&ratios, 1.0),
        median_ratio: sum::quantile(&ratios, 0.5),
        masked_fraction: masked as f64 / sharp.values.len() as f64,
    })
}

/// `‖g‖_p / ‖g^♯‖_p` with parabolic boxes at every dyadic scale. For
/// mean-zero data this stays of moderate size; the reverse inequality (the
/// sharp function never exceeding twice the box maximal function) is
/// structural. Data with a nonzero mean is rejected: the sharp function
/// kills constants, so the ratio would be unbounded by construction.
pub fn fefferman_stein_ratio(g: &SpaceTimeScalar, alpha: f64, p: f64) -> Result<f64> {
    let n = g.values.len();
    if n == 0 {
        return Err(Error::EmptyInput("g"));
    }
    let mean = g.values.iter().sum::<f64>() / n as f64;
    let rms = (g.values.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if rms == 0.0 {
        return Err(Error::EmptyInput("g is identically zero"));
    }
    if mean.abs() > 1e-10 * rms {
        return Err(Error::Unsupported(
            "sharp-function comparison needs mean-zero data; subtract the mean first".into(),
        ));
    }
    let spec = &g.spec;
    let scales: Vec<f64> = dyadic_radii(spec).into_iter().filter(|&r| r <= spec.l).collect();
    let sharp = sharp_function(g, alpha, &scales)?;
    let den = lp_norm_st(&sharp, p)?;
    if den == 0.0 {
        return Err(Error::Unsupported(
            "sharp function vanishes identically at the provided scales".into(),
        ));
    }
    Ok(lp_norm_st(g, p)? / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    #[test]
    fn sharp_domination_is_bounded() {
        let report = pointwise_sharp_check(1.0, 64, 32, 7).unwrap();
        assert!(report.sup_ratio.is_finite() && report.sup_ratio > 0.0);
        assert!(report.median_ratio <= report.sup_ratio);
        assert!(report.masked_fraction < 0.05, "masked {}", report.masked_fraction);
    }

    #[test]
    fn fefferman_stein_rejects_constants() {
        let spec = GridSpec::new(1, 1.0, 8, 4, 0.0, 1.0, 1).unwrap();
        let g = SpaceTimeScalar::new(spec, Array2::from_elem((4, 8), 3.0)).unwrap();
        assert!(fefferman_stein_ratio(&g, 1.0, 2.0).is_err());
    }

    #[test]
    fn fefferman_stein_finite_for_mean_zero_data() {
        let spec = GridSpec::new(1, PI, 32, 8, 0.0, 1.0, 1).unwrap();
        let values = Array2::from_shape_fn((spec.nt, spec.n_space()), |(i, j)| {
            (2.0 * spec.position(j)[0]).cos() * (1.0 + i as f64)
        });
        let g = SpaceTimeScalar::new(spec, values).unwrap();
        let ratio = fefferman_stein_ratio(&g, 1.0, 3.0).unwrap();
        assert!(ratio.is_finite() && ratio > 0.0, "ratio {ratio}");
        assert!(ratio < 100.0, "ratio {ratio}");
    }
}
