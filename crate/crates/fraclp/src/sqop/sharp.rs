//! Parabolic sharp maximal function over anisotropic space-time boxes.
//!
//! Boxes follow the parabolic scaling of the semigroup: a box of side `c`
//! spans `c` in each spatial axis and `c^α` in time. At each grid point the
//! sharp function takes the supremum, over all boxes of the requested scales
//! containing it, of the mean absolute deviation of `g` from the box mean.
//! Boxes are anchored on a sublattice of stride half the box extent — enough
//! overlap that every point is covered at every scale — wrapped in space and
//! kept inside the time interval.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::field::{GridSpec, SpaceTimeScalar};
use crate::sum::Accum;

fn check_inputs(alpha: f64, scales: &[f64]) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParam {
            name: "alpha",
            value: alpha,
            reason: "parabolic scaling exponent must be positive",
        });
    }
    if scales.is_empty() {
        return Err(Error::EmptyInput("scales"));
    }
    for &c in scales {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParam {
                name: "scales",
                value: c,
                reason: "box scales must be positive",
            });
        }
    }
    Ok(())
}

/// Box extents in grid cells for a parabolic box of side `c`.
fn box_geometry(spec: &GridSpec, alpha: f64, c: f64) -> (usize, usize) {
    let nt_box = ((c.powf(alpha) / spec.dt()).round() as usize).clamp(1, spec.nt);
    let nx_box = ((c / spec.h()).round() as usize).clamp(1, spec.nx);
    (nt_box, nx_box)
}

/// Anchor offsets with stride half the box size. Wrapped axes tile the whole
/// period; clipped axes stop at the boundary, with the last anchor forced so
/// the final stretch is still covered.
fn anchors(limit: usize, size: usize, wrap: bool) -> Vec<usize> {
    let stride = (size / 2).max(1);
    let mut out = Vec::new();
    if wrap {
        let mut a = 0;
        while a < limit {
            out.push(a);
            a += stride;
        }
    } else {
        let mut a = 0;
        while a + size <= limit {
            out.push(a);
            a += stride;
        }
        let last = limit - size;
        if out.last() != Some(&last) {
            out.push(last);
        }
    }
    out
}

/// Visit every box of scale `c`: `visit(time_start, nt_box, flat_points)`.
fn for_each_box<F: FnMut(usize, usize, &[usize])>(
    spec: &GridSpec,
    alpha: f64,
    c: f64,
    mut visit: F,
) {
    let (nt_box, nx_box) = box_geometry(spec, alpha, c);
    let t_anchors = anchors(spec.nt, nt_box, false);
    let x_anchors = anchors(spec.nx, nx_box, true);
    let na = x_anchors.len();
    let n_tuples = na.pow(spec.d as u32);
    let n_offsets = nx_box.pow(spec.d as u32);

    let mut flat = vec![0usize; n_offsets];
    let mut idx = [0usize; 3];
    for tup in 0..n_tuples {
        // spatial anchor for each axis, then all wrapped points of the box
        let mut rem = tup;
        let mut base = [0usize; 3];
        for b in base.iter_mut().take(spec.d) {
            *b = x_anchors[rem % na];
            rem /= na;
        }
        for (off, slot) in flat.iter_mut().enumerate() {
            let mut rem = off;
            for a in 0..spec.d {
                idx[a] = (base[a] + rem % nx_box) % spec.nx;
                rem /= nx_box;
            }
            *slot = spec.flatten(&idx[..spec.d]);
        }
        for &t0 in &t_anchors {
            visit(t0, nt_box, &flat);
        }
    }
}

/// Sharp maximal function: supremum over covering parabolic boxes of the
/// mean absolute deviation from the box mean.
pub fn sharp_function(
    g: &SpaceTimeScalar,
    alpha: f64,
    scales: &[f64],
) -> Result<SpaceTimeScalar> {
    check_inputs(alpha, scales)?;
    let spec = &g.spec;
    let mut out = Array2::zeros((spec.nt, spec.n_space()));
    for &c in scales {
        for_each_box(spec, alpha, c, |t0, nt_box, flat| {
            let count = (nt_box * flat.len()) as f64;
            let mut mean = Accum::new();
            for it in t0..t0 + nt_box {
                for &x in flat {
                    mean.add(g.values[(it, x)]);
                }
            }
            let mu = mean.value() / count;
            let mut dev = Accum::new();
            for it in t0..t0 + nt_box {
                for &x in flat {
                    dev.add((g.values[(it, x)] - mu).abs());
                }
            }
            let mad = dev.value() / count;
            for it in t0..t0 + nt_box {
                for &x in flat {
                    if mad > out[(it, x)] {
                        out[(it, x)] = mad;
                    }
                }
            }
        });
    }
    SpaceTimeScalar::new(spec.clone(), out)
}

/// Companion bound: supremum over the same covering boxes of the mean of
/// `|g|`. The sharp function never exceeds twice this value.
pub fn box_maximal(g: &SpaceTimeScalar, alpha: f64, scales: &[f64]) -> Result<SpaceTimeScalar> {
    check_inputs(alpha, scales)?;
    let spec = &g.spec;
    let mut out = Array2::zeros((spec.nt, spec.n_space()));
    for &c in scales {
        for_each_box(spec, alpha, c, |t0, nt_box, flat| {
            let count = (nt_box * flat.len()) as f64;
            let mut acc = Accum::new();
            for it in t0..t0 + nt_box {
                for &x in flat {
                    acc.add(g.values[(it, x)].abs());
                }
            }
            let mean = acc.value() / count;
            for it in t0..t0 + nt_box {
                for &x in flat {
                    if mean > out[(it, x)] {
                        out[(it, x)] = mean;
                    }
                }
            }
        });
    }
    SpaceTimeScalar::new(spec.clone(), out)
}
