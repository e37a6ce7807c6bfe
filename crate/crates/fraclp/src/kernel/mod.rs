//! Pointwise evaluation of the α-stable kernels
//! `φ_β(t, x) = t^{β/α} ∫ e^{iξ·x} |ξ|^β e^{-(2π)^α t |ξ|^α} dξ`
//! (so `φ_0 = p` is the transition kernel itself) by three complementary
//! methods, plus the radial envelope, decay fits, and symbol bounds used to
//! certify the kernel estimates.
//!
//! * [`contour`] — rotated-ray contour integration, d = 1 only. Method of
//!   record: cheapest, highest accuracy, works far into the tail.
//! * [`radial`] — oscillatory quadrature of the radial (cos / Bessel) Fourier
//!   reduction, d = 1..3. Independent of the contour method.
//! * [`grid`] — truncated Fourier-lattice sum, which evaluates the
//!   2L-periodized kernel; used as a third cross-check with an explicit
//!   image/truncation error estimate.

pub mod bessel;
pub mod bounds;
pub mod contour;
pub mod decay;
pub mod envelope;
pub mod grid;
pub mod radial;

use crate::error::{Error, Result};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

/// Exponent at which integral tails are truncated: relative tail mass
/// `e^{-TAIL_EXPONENT}` is far below every tolerance used here.
pub(crate) const TAIL_EXPONENT: f64 = 42.0;

/// Kernel family parameters: dimension, stability index α, derivative order
/// β, and time t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
    pub t: f64,
}

impl KernelParams {
    pub fn new(d: usize, alpha: f64, beta: f64, t: f64) -> Result<Self> {
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
        Ok(KernelParams { d, alpha, beta, t })
    }
}

/// A single kernel value with an a-posteriori error estimate.
#[derive(Debug, Clone, Copy)]
pub struct KernelPoint {
    pub value: f64,
    pub err_estimate: f64,
}

/// Evaluation method tag, also used in CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Contour,
    RadialBessel,
    GridFourier,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Contour => "contour",
            Method::RadialBessel => "radial_bessel",
            Method::GridFourier => "grid_fourier",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "contour" => Ok(Method::Contour),
            "radial_bessel" => Ok(Method::RadialBessel),
            "grid_fourier" => Ok(Method::GridFourier),
            other => Err(format!(
                "unknown method `{other}` (expected contour|radial_bessel|grid_fourier)"
            )),
        }
    }
}

/// A kernel value at one radius.
#[derive(Debug, Clone, Copy)]
pub struct KernelSample {
    pub r: f64,
    pub value: f64,
    pub err_estimate: f64,
    pub method: Method,
}

/// Surface area of the unit sphere in d dimensions, d = 1..3.
pub fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => panic!("dimension out of range"),
    }
}

/// Closed form for the kernel at the origin:
/// `φ_β(t, 0) = |S^{d-1}| Γ((β+d)/α) / (α (2π)^{β+d} t^{d/α})`.
pub fn kernel_at_origin(p: &KernelParams) -> f64 {
    sphere_area(p.d) * gamma((p.beta + p.d as f64) / p.alpha)
        / (p.alpha * (2.0 * PI).powf(p.beta + p.d as f64) * p.t.powf(p.d as f64 / p.alpha))
}

/// Evaluate the kernel at several radii with one method. For `GridFourier`
/// the lattice tables are built once; `grid_size` overrides the tuned
/// defaults (required for parameter combinations without one).
pub fn evaluate_many(
    p: &KernelParams,
    radii: &[f64],
    method: Method,
    grid_size: Option<(f64, usize)>,
) -> Result<Vec<KernelSample>> {
    if radii.is_empty() {
        return Err(Error::EmptyInput("radii"));
    }
    match method {
        Method::Contour => {
            if p.d != 1 {
                return Err(Error::Unsupported(
                    "contour evaluation is one-dimensional; use radial_bessel or grid_fourier"
                        .into(),
                ));
            }
            radii
                .iter()
                .map(|&r| {
                    contour::eval(p.alpha, p.beta, p.t, r).map(|kp| KernelSample {
                        r,
                        value: kp.value,
                        err_estimate: kp.err_estimate,
                        method,
                    })
                })
                .collect()
        }
        Method::RadialBessel => radii
            .iter()
            .map(|&r| {
                radial::eval(p.d, p.alpha, p.beta, p.t, r).map(|kp| KernelSample {
                    r,
                    value: kp.value,
                    err_estimate: kp.err_estimate,
                    method,
                })
            })
            .collect(),
        Method::GridFourier => {
            let (l, nx) = match grid_size.or_else(|| grid::defaults(p.d, p.alpha)) {
                Some(s) => s,
                None => {
                    return Err(Error::Unsupported(format!(
                        "no tuned lattice for d={} alpha={}; pass an explicit (l, nx)",
                        p.d, p.alpha
                    )))
                }
            };
            let gk = grid::GridKernel::build(p.d, p.alpha, p.beta, p.t, l, nx)?;
            Ok(radii.iter().map(|&r| gk.eval(r)).collect())
        }
    }
}
