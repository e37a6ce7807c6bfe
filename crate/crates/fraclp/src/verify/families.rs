//! Band-limited space-time test fields with interior time support.
//!
//! Every family is a finite sum of lattice Fourier modes with norm inside a
//! physical band, multiplied by a smooth time envelope vanishing outside an
//! interior fraction of the window. Modes depend only on the box half-width
//! and the band — not on the grid resolution — so the same seed produces the
//! same physical field across resolution rungs. The zero mode is always
//! excluded: fields are mean-zero on every time slice.

use std::f64::consts::PI;

use ndarray::Array3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{GridSpec, SpaceTimeField};

/// Cap on the number of modes a single field carries.
const MAX_MODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// One lattice mode, the lowest norm inside the band.
    SingleMode,
    /// All band modes with a fixed Gaussian amplitude profile.
    SmoothBump,
    /// Seeded amplitudes in `[0.3, 1]` and uniform phases per mode.
    RandomBandlimited,
    /// A product of one cosine per axis, equal frequency on each.
    TensorSeparable,
}

#[derive(Debug, Clone)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    /// Physical frequency band `[lo, hi]`, `0 < lo <= hi`.
    pub band: (f64, f64),
    /// Time support as fractions `(s0, s1)` of the window, `0 <= s0 < s1 <= 1`.
    pub support: (f64, f64),
}

/// Smooth envelope on `[a, b]`, zero outside, quadratic contact at the ends.
fn envelope(t: f64, a: f64, b: f64) -> f64 {
    if t <= a || t >= b {
        0.0
    } else {
        let s = (PI * (t - a) / (b - a)).sin();
        s * s
    }
}

/// Lattice modes with norm in the band, one representative per `±k` pair,
/// sorted by `(norm, k)` so the ordering is resolution-independent.
fn modes_in_band(d: usize, l: f64, band: (f64, f64)) -> Vec<[i64; 3]> {
    let dxi = PI / l;
    let kmax = (band.1 / dxi).floor() as i64;
    let mut out = Vec::new();
    let ranges = |active: bool| if active { -kmax..=kmax } else { 0..=0 };
    for k1 in 1..=kmax {
        for k2 in ranges(d >= 2) {
            for k3 in ranges(d >= 3) {
                let norm = dxi * ((k1 * k1 + k2 * k2 + k3 * k3) as f64).sqrt();
                if norm >= band.0 && norm <= band.1 {
                    out.push(([k1, k2, k3], norm));
                }
            }
        }
    }
    // axis-1 component zero: representative has first nonzero component positive
    if d >= 2 {
        for k2 in 1..=kmax {
            for k3 in ranges(d >= 3) {
                let norm = dxi * ((k2 * k2 + k3 * k3) as f64).sqrt();
                if norm >= band.0 && norm <= band.1 {
                    out.push(([0, k2, k3], norm));
                }
            }
        }
        if d >= 3 {
            for k3 in 1..=kmax {
                let norm = dxi * k3 as f64;
                if norm >= band.0 && norm <= band.1 {
                    out.push(([0, 0, k3], norm));
                }
            }
        }
    }
    out.sort_by(|a, b| (a.1, a.0).partial_cmp(&(b.1, b.0)).unwrap());
    let vecs: Vec<[i64; 3]> = out.into_iter().map(|(k, _)| k).collect();
    if vecs.len() <= MAX_MODES {
        return vecs;
    }
    // deterministic thinning, still resolution-independent
    let stride = vecs.len().div_ceil(MAX_MODES);
    vecs.into_iter().step_by(stride).collect()
}

fn validate(spec: &GridSpec, fam: &FamilySpec) -> Result<()> {
    let (lo, hi) = fam.band;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidGrid(format!("band [{lo}, {hi}] must satisfy 0 < lo <= hi")));
    }
    if hi > 0.5 * spec.xi_max() {
        return Err(Error::InvalidGrid(format!(
            "band top {hi} exceeds half the grid frequency limit {}",
            0.5 * spec.xi_max()
        )));
    }
    let (s0, s1) = fam.support;
    if !(0.0..=1.0).contains(&s0) || !(0.0..=1.0).contains(&s1) || s0 >= s1 {
        return Err(Error::InvalidGrid(format!(
            "time support fractions ({s0}, {s1}) must satisfy 0 <= s0 < s1 <= 1"
        )));
    }
    Ok(())
}

/// Draw a field of the given family on the grid. The same `(l, band, seed)`
/// triple yields the same physical field at any resolution.
pub fn sample_field(spec: &GridSpec, fam: &FamilySpec, seed: u64) -> Result<SpaceTimeField> {
    validate(spec, fam)?;
    let modes = modes_in_band(spec.d, spec.l, fam.band);
    if modes.is_empty() {
        return Err(Error::InvalidGrid(format!(
            "no lattice modes inside band [{}, {}] for box half-width {}",
            fam.band.0, fam.band.1, spec.l
        )));
    }
    let dxi = PI / spec.l;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // per-channel mode coefficients
    let mut coeffs: Vec<Vec<(usize, f64, f64)>> = Vec::new(); // (mode idx, amplitude, phase)
    for ch in 0..spec.m {
        let shift = 0.41 * ch as f64;
        let damp = 1.0 / (ch + 1) as f64;
        let list: Vec<(usize, f64, f64)> = match fam.kind {
            FamilyKind::SingleMode => vec![(0, damp, shift)],
            FamilyKind::SmoothBump => {
                let sigma = 0.5 * fam.band.1;
                modes
                    .iter()
                    .enumerate()
                    .map(|(j, k)| {
                        let norm = dxi * norm3(k);
                        (j, damp * (-norm * norm / (2.0 * sigma * sigma)).exp(), shift)
                    })
                    .collect()
            }
            FamilyKind::RandomBandlimited => modes
                .iter()
                .enumerate()
                .map(|(j, _)| {
                    let amp: f64 = rng.random_range(0.3..1.0);
                    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    let phase: f64 = rng.random_range(0.0..2.0 * PI);
                    (j, damp * sign * amp, phase)
                })
                .collect(),
            FamilyKind::TensorSeparable => vec![(0, damp, shift)], // handled separately below
        };
        coeffs.push(list);
    }

    // spatial profiles, one per channel
    let n = spec.n_space();
    let mut profiles = vec![vec![0.0f64; n]; spec.m];
    if fam.kind == FamilyKind::TensorSeparable {
        // equal per-axis frequency with total norm inside the band
        let root_d = (spec.d as f64).sqrt();
        let mid = 0.5 * (fam.band.0 + fam.band.1);
        let mut k = (mid / (root_d * dxi)).round().max(1.0) as i64;
        let norm_of = |k: i64| dxi * k as f64 * root_d;
        if norm_of(k) < fam.band.0 {
            k += 1;
        }
        if norm_of(k) > fam.band.1 || norm_of(k) < fam.band.0 {
            return Err(Error::InvalidGrid(format!(
                "no separable frequency with equal components in band [{}, {}]",
                fam.band.0, fam.band.1
            )));
        }
        let xi = dxi * k as f64;
        for (ch, profile) in profiles.iter_mut().enumerate() {
            let damp = 1.0 / (ch + 1) as f64;
            for (flat, slot) in profile.iter_mut().enumerate() {
                let pos = spec.position(flat);
                let mut v = damp;
                for (a, &p) in pos.iter().enumerate().take(spec.d) {
                    v *= (xi * p + PI / 5.0 * (a + 1) as f64 + 0.41 * ch as f64).cos();
                }
                *slot = v;
            }
        }
    } else {
        for (ch, profile) in profiles.iter_mut().enumerate() {
            for (flat, slot) in profile.iter_mut().enumerate() {
                let pos = spec.position(flat);
                let mut acc = 0.0;
                for &(j, amp, phase) in &coeffs[ch] {
                    let k = modes[j];
                    let mut dot = 0.0;
                    for (a, &p) in pos.iter().enumerate().take(spec.d) {
                        dot += dxi * k[a] as f64 * p;
                    }
                    acc += amp * (dot + phase).cos();
                }
                *slot = acc;
            }
        }
    }

    let a = spec.t0 + fam.support.0 * (spec.t1 - spec.t0);
    let b = spec.t0 + fam.support.1 * (spec.t1 - spec.t0);
    let mut values = Array3::zeros((spec.nt, n, spec.m));
    for i in 0..spec.nt {
        let env = envelope(spec.time(i), a, b);
        for x in 0..n {
            for ch in 0..spec.m {
                values[(i, x, ch)] = env * profiles[ch][x];
            }
        }
    }
    SpaceTimeField::new(spec.clone(), values)
}

fn norm3(k: &[i64; 3]) -> f64 {
    ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt()
}
