//! Space-time fields on a periodic box and their rectangle-rule norms.
//!
//! Space is the periodic box `[-L, L)^d` sampled on `Nx^d` points (`Nx` a
//! power of two), time is `[t0, t1)` sampled at `Nt` left endpoints; a field
//! value at time index `i` represents the cell `[t_i, t_i + dt)`. Fields may
//! carry `m` channels; pointwise magnitudes are Euclidean over channels.

use crate::error::{Error, Result};
use crate::sum::Accum;
use ndarray::{Array1, Array2, Array3};

/// Grid geometry shared by every field in a computation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// Spatial dimension, 1..=3.
    pub d: usize,
    /// Half-width of the periodic box `[-L, L)^d`.
    pub l: f64,
    /// Points per spatial axis; power of two.
    pub nx: usize,
    /// Time steps.
    pub nt: usize,
    /// Start of the time interval.
    pub t0: f64,
    /// End of the time interval.
    pub t1: f64,
    /// Channel count of vector-valued fields.
    pub m: usize,
}

impl GridSpec {
    pub fn new(d: usize, l: f64, nx: usize, nt: usize, t0: f64, t1: f64, m: usize) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::InvalidGrid(format!("dimension {d} not in 1..=3")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidGrid(format!("half-width {l} must be positive")));
        }
        if nx < 2 || !nx.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("nx = {nx} must be a power of two >= 2")));
        }
        if nt < 1 {
            return Err(Error::InvalidGrid("nt must be >= 1".into()));
        }
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::InvalidGrid(format!("time interval [{t0}, {t1}) is empty")));
        }
        if m == 0 {
            return Err(Error::InvalidGrid("channel count m must be >= 1".into()));
        }
        Ok(Self { d, l, nx, nt, t0, t1, m })
    }

    /// Spatial mesh width `2L / Nx`.
    pub fn h(&self) -> f64 {
        2.0 * self.l / self.nx as f64
    }

    /// Time step `(t1 - t0) / Nt`.
    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / self.nt as f64
    }

    /// Total spatial sites `Nx^d`.
    pub fn n_space(&self) -> usize {
        self.nx.pow(self.d as u32)
    }

    /// Cell measure `dt * h^d`.
    pub fn cell_measure(&self) -> f64 {
        self.dt() * self.h().powi(self.d as i32)
    }

    /// Time sample `t_i = t0 + i dt`.
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt()
    }

    /// Right edge of time cell `i`: `t0 + (i + 1) dt`.
    pub fn time_right(&self, i: usize) -> f64 {
        self.t0 + (i + 1) as f64 * self.dt()
    }

    /// Coordinate of a point along one axis: `-L + j h`.
    pub fn coord(&self, j: usize) -> f64 {
        -self.l + j as f64 * self.h()
    }

    /// Decompose a flat spatial index into per-axis indices (row-major).
    pub fn unflatten(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for axis in (0..self.d).rev() {
            idx[axis] = flat % self.nx;
            flat /= self.nx;
        }
        idx
    }

    /// Flatten per-axis indices (row-major).
    pub fn flatten(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for axis in 0..self.d {
            flat = flat * self.nx + (idx[axis] % self.nx);
        }
        flat
    }

    /// Position vector of a flat spatial index.
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut x = [0.0; 3];
        for axis in 0..self.d {
            x[axis] = self.coord(idx[axis]);
        }
        x
    }

    /// Signed frequency index along one axis for FFT bin `k`, in `[-Nx/2, Nx/2)`.
    pub fn freq_index(&self, k: usize) -> i64 {
        let n = self.nx as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Frequency `ξ = π k / L` for FFT bin `k` along one axis.
    pub fn xi(&self, k: usize) -> f64 {
        std::f64::consts::PI * self.freq_index(k) as f64 / self.l
    }

    /// Largest resolved `|ξ|` along one axis, `π Nx / (2 L)`.
    pub fn xi_max(&self) -> f64 {
        std::f64::consts::PI * (self.nx as f64 / 2.0) / self.l
    }

    /// `|ξ|` of a flat spatial index.
    pub fn xi_norm(&self, flat: usize) -> f64 {
        let idx = self.unflatten(flat);
        let mut s = 0.0;
        for axis in 0..self.d {
            let xi = self.xi(idx[axis]);
            s += xi * xi;
        }
        s.sqrt()
    }
}

/// Scalar spatial field (one time slice, one channel).
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub spec: GridSpec,
    /// Length `n_space()`.
    pub values: Array1<f64>,
}

impl ScalarField {
    pub fn new(spec: GridSpec, values: Array1<f64>) -> Result<Self> {
        if values.len() != spec.n_space() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} spatial sites", spec.n_space()),
                got: format!("{}", values.len()),
            });
        }
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        let n = spec.n_space();
        Self { spec, values: Array1::zeros(n) }
    }

    /// Sample a function of position onto the grid.
    pub fn from_fn<F: FnMut(&[f64]) -> f64>(spec: GridSpec, mut f: F) -> Self {
        let n = spec.n_space();
        let mut values = Array1::zeros(n);
        for j in 0..n {
            let x = spec.position(j);
            values[j] = f(&x[..spec.d]);
        }
        Self { spec, values }
    }
}

/// Scalar space-time field (one channel), shape `(Nt, n_space)`.
#[derive(Debug, Clone)]
pub struct SpaceTimeScalar {
    pub spec: GridSpec,
    pub values: Array2<f64>,
}

impl SpaceTimeScalar {
    pub fn new(spec: GridSpec, values: Array2<f64>) -> Result<Self> {
        if values.dim() != (spec.nt, spec.n_space()) {
            return Err(Error::ShapeMismatch {
                expected: format!("({}, {})", spec.nt, spec.n_space()),
                got: format!("{:?}", values.dim()),
            });
        }
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        let sh = (spec.nt, spec.n_space());
        Self { spec, values: Array2::zeros(sh) }
    }
}

/// Vector-valued space-time field, shape `(Nt, n_space, m)`.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    pub spec: GridSpec,
    pub values: Array3<f64>,
}

impl SpaceTimeField {
    pub fn new(spec: GridSpec, values: Array3<f64>) -> Result<Self> {
        if values.dim() != (spec.nt, spec.n_space(), spec.m) {
            return Err(Error::ShapeMismatch {
                expected: format!("({}, {}, {})", spec.nt, spec.n_space(), spec.m),
                got: format!("{:?}", values.dim()),
            });
        }
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        let sh = (spec.nt, spec.n_space(), spec.m);
        Self { spec, values: Array3::zeros(sh) }
    }

    /// A single channel as a scalar space-time field.
    pub fn channel(&self, c: usize) -> SpaceTimeScalar {
        let (nt, nsp, _) = self.values.dim();
        let mut out = Array2::zeros((nt, nsp));
        for i in 0..nt {
            for j in 0..nsp {
                out[(i, j)] = self.values[(i, j, c)];
            }
        }
        SpaceTimeScalar { spec: self.spec.clone(), values: out }
    }

    /// Pointwise channel magnitude `|f(t,x)|_H`, squared.
    pub fn channel_sq(&self) -> SpaceTimeScalar {
        let (nt, nsp, m) = self.values.dim();
        let mut out = Array2::zeros((nt, nsp));
        for i in 0..nt {
            for j in 0..nsp {
                let mut s = 0.0;
                for c in 0..m {
                    let v = self.values[(i, j, c)];
                    s += v * v;
                }
                out[(i, j)] = s;
            }
        }
        SpaceTimeScalar { spec: self.spec.clone(), values: out }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::InvalidParam {
            name: "p",
            value: p,
            reason: "Lebesgue exponent must be finite and >= 1",
        });
    }
    Ok(())
}

/// Rectangle-rule `L_p` norm of a vector-valued space-time field:
/// `(Σ_{i,j} dt h^d |f(t_i, x_j)|_H^p)^{1/p}`.
pub fn lp_norm(f: &SpaceTimeField, p: f64) -> Result<f64> {
    check_p(p)?;
    let (nt, nsp, m) = f.values.dim();
    let mut acc = Accum::new();
    for i in 0..nt {
        for j in 0..nsp {
            let mut s = 0.0;
            for c in 0..m {
                let v = f.values[(i, j, c)];
                if !v.is_finite() {
                    return Err(Error::NonFinite { context: "lp_norm input" });
                }
                s += v * v;
            }
            acc.add(s.sqrt().powf(p));
        }
    }
    Ok((f.spec.cell_measure() * acc.value()).powf(1.0 / p))
}

/// Rectangle-rule `L_p` norm of a scalar space-time field.
pub fn lp_norm_st(g: &SpaceTimeScalar, p: f64) -> Result<f64> {
    check_p(p)?;
    let mut acc = Accum::new();
    for &v in g.values.iter() {
        if !v.is_finite() {
            return Err(Error::NonFinite { context: "lp_norm_st input" });
        }
        acc.add(v.abs().powf(p));
    }
    Ok((g.spec.cell_measure() * acc.value()).powf(1.0 / p))
}

/// Rectangle-rule spatial `L_p` norm of a scalar field: `(Σ_j h^d |g_j|^p)^{1/p}`.
pub fn lp_norm_scalar(g: &ScalarField, p: f64) -> Result<f64> {
    check_p(p)?;
    let mut acc = Accum::new();
    for &v in g.values.iter() {
        if !v.is_finite() {
            return Err(Error::NonFinite { context: "lp_norm_scalar input" });
        }
        acc.add(v.abs().powf(p));
    }
    Ok((g.spec.h().powi(g.spec.d as i32) * acc.value()).powf(1.0 / p))
}

/// Bessel-potential Sobolev norm `‖(1 - Δ)^{s/2} g‖_{L_p}` of a spatial field,
/// computed spectrally. `s = 0` reduces to `lp_norm_scalar`.
pub fn sobolev_norm(g: &ScalarField, s: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    if !s.is_finite() {
        return Err(Error::InvalidParam {
            name: "s",
            value: s,
            reason: "smoothness order must be finite",
        });
    }
    let smoothed = crate::spectral::bessel_potential(g, s)?;
    lp_norm_scalar(&smoothed, p)
}
