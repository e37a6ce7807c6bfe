//! The square function's `L^2` identity and its parabolic scale covariance.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{lp_norm, lp_norm_st, GridSpec, SpaceTimeField};
use crate::sqop::{square_function, PsiSpec, TimeQuadMesh};
use crate::verify::families::{sample_field, FamilyKind, FamilySpec};

/// The exact `L^2` constant of the square function at `β = α/2`:
/// each nonzero frequency contributes `∫_0^∞ τ |ξ|^α e^{-2 (2π)^α τ |ξ|^α} dτ/τ
/// = 1 / (2 (2π)^α)`, independent of the frequency.
pub fn square_function_constant(alpha: f64) -> f64 {
    1.0 / (2.0 * (2.0 * PI).powf(alpha))
}

#[derive(Debug, Clone)]
pub struct IdentityRung {
    pub window: f64,
    pub nt: usize,
    /// `‖G f‖_2^2 / (C(α) ‖f‖_2^2)`; approaches one from below as the window
    /// grows, the gap being the τ-coverage the window cannot see.
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct L2IdentityReport {
    pub alpha: f64,
    pub constant: f64,
    pub rungs: Vec<IdentityRung>,
}

/// Window, band, and time-support fractions sized so the truncation deficit
/// at the full window stays well under one percent: the slowest surviving
/// rate is `2 (2π)^α ξ_lo^α` per unit of uncovered time, and the envelope
/// leaves a `(1 - s1)`-fraction of the window uncovered at the right edge.
pub(crate) fn identity_params(alpha: f64) -> (f64, (f64, f64), (f64, f64)) {
    if (alpha - 0.5).abs() < 1e-9 {
        (2.8, (1.0, 4.0), (0.2, 0.8))
    } else if (alpha - 1.5).abs() < 1e-9 {
        (1.6, (0.5, 1.0), (0.2, 0.85))
    } else if (alpha - 1.0).abs() < 1e-9 {
        (2.0, (0.5, 4.0), (0.2, 0.85))
    } else {
        let c = (2.0 * PI).powf(alpha);
        (12.0 / c, (1.0, 2.0), (0.2, 0.8))
    }
}

/// Measure `‖G f‖_2^2 / ‖f‖_2^2` against the exact constant on a ladder of
/// growing windows sharing one time step. Fields are drawn on a box of
/// half-width `2π` from the seeded band-limited family.
pub fn l2_identity_check(
    alpha: f64,
    nx: usize,
    nt_top: usize,
    seed: u64,
) -> Result<L2IdentityReport> {
    if nt_top < 8 {
        return Err(Error::InvalidGrid(format!("nt_top = {nt_top} too coarse for the ladder")));
    }
    let (window, band, support) = identity_params(alpha);
    let constant = square_function_constant(alpha);
    let dt = window / nt_top as f64;
    let psi = PsiSpec::PhiBeta { beta: 0.5 * alpha };
    let fam = FamilySpec { kind: FamilyKind::RandomBandlimited, band, support };

    let mut rungs = Vec::new();
    for frac in [0.5, 0.75, 1.0] {
        let nt = (nt_top as f64 * frac).round() as usize;
        let w = dt * nt as f64;
        let spec = GridSpec::new(1, 2.0 * PI, nx, nt, 0.0, w, 1)?;
        let f = sample_field(&spec, &fam, seed)?;
        let mesh = TimeQuadMesh::build(&spec, alpha, &psi)?;
        let g = square_function(&f, &psi, &mesh)?;
        let num = lp_norm_st(&g, 2.0)?.powi(2);
        let den = lp_norm(&f, 2.0)?.powi(2);
        rungs.push(IdentityRung { window: w, nt, ratio: num / (den * constant) });
    }
    Ok(L2IdentityReport { alpha, constant, rungs })
}

#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub alpha: f64,
    pub c: f64,
    /// Sup-norm mismatch between `G` on the base grid and `G` on the
    /// parabolic companion grid carrying the same value array.
    pub covariance_err: f64,
    /// Sup-norm error of the single-mode closed form on the base grid.
    pub anchor_err: f64,
}

/// Parabolic scale covariance: shrinking the box by `c` and the window by
/// `c^α` while keeping the sampled values produces the identical square
/// function. The discrete operator inherits this exactly because every mesh
/// ingredient (time step, frequency lattice, quadrature nodes, floor) scales
/// covariantly, so the mismatch is pure floating-point noise.
pub fn scaling_check(
    alpha: f64,
    c: f64,
    nx: usize,
    nt: usize,
    seed: u64,
) -> Result<ScalingReport> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParam {
            name: "c",
            value: c,
            reason: "scale factor must be positive",
        });
    }
    let psi = PsiSpec::PhiBeta { beta: 0.5 * alpha };
    psi.validate(alpha)?;
    let l = 2.0 * PI;
    let (t0, t1) = (0.3, 1.5);
    let fam =
        FamilySpec { kind: FamilyKind::RandomBandlimited, band: (0.5, 3.0), support: (0.1, 0.9) };

    let base = GridSpec::new(1, l, nx, nt, t0, t1, 1)?;
    let f_base = sample_field(&base, &fam, seed)?;
    let ca = c.powf(alpha);
    let companion = GridSpec::new(1, l / c, nx, nt, t0 / ca, t1 / ca, 1)?;
    let f_comp = SpaceTimeField::new(companion.clone(), f_base.values.clone())?;

    let mesh_base = TimeQuadMesh::build(&base, alpha, &psi)?;
    let mesh_comp = TimeQuadMesh::build(&companion, alpha, &psi)?;
    let g_base = square_function(&f_base, &psi, &mesh_base)?;
    let g_comp = square_function(&f_comp, &psi, &mesh_comp)?;

    let top = g_base.values.iter().cloned().fold(0.0f64, f64::max);
    let mut covariance_err = 0.0f64;
    for (a, b) in g_base.values.iter().zip(g_comp.values.iter()) {
        covariance_err = covariance_err.max((a - b).abs());
    }
    covariance_err /= top;

    // anchor: f = cos(x), constant in time, against the closed form
    // G(T, x)^2 = cos(x)^2 (1 - e^{-2 (2π)^α T}) / (2 (2π)^α)
    let mut values = ndarray::Array3::zeros((nt, base.n_space(), 1));
    for i in 0..nt {
        for x in 0..base.n_space() {
            values[(i, x, 0)] = base.coord(x).cos();
        }
    }
    let f_anchor = SpaceTimeField::new(base.clone(), values)?;
    let g_anchor = square_function(&f_anchor, &psi, &mesh_base)?;
    let ck = (2.0 * PI).powf(alpha);
    let scale = square_function_constant(alpha).sqrt();
    let mut anchor_err = 0.0f64;
    for i in 0..nt {
        let t = base.time_right(i) - base.t0;
        let level = ((1.0 - (-2.0 * ck * t).exp()) / (2.0 * ck)).sqrt();
        for x in 0..base.n_space() {
            let expected = base.coord(x).cos().abs() * level;
            anchor_err = anchor_err.max((g_anchor.values[(i, x)] - expected).abs());
        }
    }
    anchor_err /= scale;

    Ok(ScalingReport { alpha, c, covariance_err, anchor_err })
}
