//! Hardy-Littlewood maximal functions over spatial balls and time windows.
//!
//! Both operators average `|g|` and take the pointwise supremum over the
//! supplied radii. Spatial balls are open, live on the periodic box (wrapped
//! lattice distance), and are normalized by the number of lattice points they
//! contain; time windows are open symmetric intervals, extended by zero
//! outside `[t0, t1)` but still normalized by the full window point count.
//! Both include the degenerate singleton window, so the output dominates
//! `|g|` pointwise.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{GridSpec, SpaceTimeScalar};
use crate::spectral;

fn check_scales(name: &'static str, scales: &[f64]) -> Result<()> {
    if scales.is_empty() {
        return Err(Error::EmptyInput(name));
    }
    for &s in scales {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidParam {
                name,
                value: s,
                reason: "averaging scales must be positive",
            });
        }
    }
    Ok(())
}

/// Spatial maximal function: supremum over `radii` of the average of `|g|`
/// on open balls of the wrapped lattice, one ball per grid point.
pub fn maximal_x(g: &SpaceTimeScalar, radii: &[f64]) -> Result<SpaceTimeScalar> {
    check_scales("radii", radii)?;
    let spec = &g.spec;
    let n = spec.n_space();
    let nt = spec.nt;
    let h = spec.h();

    let mut out = Array2::zeros((nt, n));
    for i in 0..nt {
        for x in 0..n {
            out[(i, x)] = g.values[(i, x)].abs();
        }
    }

    // forward FFT of |g| per time slice, shared across radii
    let slice_ffts: Vec<Vec<Complex64>> = (0..nt)
        .into_par_iter()
        .map(|i| {
            let mut data: Vec<Complex64> =
                (0..n).map(|x| Complex64::new(g.values[(i, x)].abs(), 0.0)).collect();
            spectral::fft_nd(spec, &mut data, false);
            data
        })
        .collect();

    for &r in radii {
        // open-ball indicator over wrapped lattice offsets
        let mut indicator = vec![Complex64::new(0.0, 0.0); n];
        let mut count = 0usize;
        for (flat, ind) in indicator.iter_mut().enumerate() {
            let idx = spec.unflatten(flat);
            let mut d2 = 0.0;
            for &o in idx.iter().take(spec.d) {
                let wrapped = o.min(spec.nx - o) as f64 * h;
                d2 += wrapped * wrapped;
            }
            if d2.sqrt() < r {
                *ind = Complex64::new(1.0, 0.0);
                count += 1;
            }
        }
        spectral::fft_nd(spec, &mut indicator, false);
        let scale = 1.0 / (count as f64 * n as f64);

        let rows: Vec<Vec<f64>> = (0..nt)
            .into_par_iter()
            .map(|i| {
                let mut buf: Vec<Complex64> = slice_ffts[i]
                    .iter()
                    .zip(indicator.iter())
                    .map(|(a, b)| a * b)
                    .collect();
                spectral::fft_nd(spec, &mut buf, true);
                buf.iter().map(|v| v.re * scale).collect()
            })
            .collect();
        for (i, row) in rows.into_iter().enumerate() {
            for (x, v) in row.into_iter().enumerate() {
                if v > out[(i, x)] {
                    out[(i, x)] = v;
                }
            }
        }
    }
    SpaceTimeScalar::new(spec.clone(), out)
}

/// Time maximal function: supremum over `widths` of the average of `|g|`
/// on open windows `(t - u, t + u)`, zero-extended outside the time interval
/// but normalized by the full window point count.
pub fn maximal_t(g: &SpaceTimeScalar, widths: &[f64]) -> Result<SpaceTimeScalar> {
    check_scales("widths", widths)?;
    let spec = &g.spec;
    let n = spec.n_space();
    let nt = spec.nt;
    let dt = spec.dt();

    let mut out = Array2::zeros((nt, n));
    for i in 0..nt {
        for x in 0..n {
            out[(i, x)] = g.values[(i, x)].abs();
        }
    }

    // prefix sums of |g| along time, one column per grid point
    let mut prefix: Array2<f64> = Array2::zeros((nt + 1, n));
    for i in 0..nt {
        for x in 0..n {
            prefix[(i + 1, x)] = prefix[(i, x)] + g.values[(i, x)].abs();
        }
    }

    for &u in widths {
        // sample lags strictly inside the open window
        let k = (u / dt).ceil() as usize - 1;
        let count = (2 * k + 1) as f64;
        for i in 0..nt {
            let lo = i.saturating_sub(k);
            let hi = (i + k + 1).min(nt);
            for x in 0..n {
                let avg = (prefix[(hi, x)] - prefix[(lo, x)]) / count;
                if avg > out[(i, x)] {
                    out[(i, x)] = avg;
                }
            }
        }
    }
    SpaceTimeScalar::new(spec.clone(), out)
}

/// Dyadic ball radii `(2^k + 1/2) h` up to the box half-width.
pub fn dyadic_radii(spec: &GridSpec) -> Vec<f64> {
    let h = spec.h();
    let mut out = Vec::new();
    let mut k = 0u32;
    loop {
        let r = ((1u64 << k) as f64 + 0.5) * h;
        if r > spec.l {
            break;
        }
        out.push(r);
        k += 1;
    }
    out
}

/// Dyadic window half-widths `(2^k + 1/2) dt` up to the time interval length.
pub fn dyadic_widths(spec: &GridSpec) -> Vec<f64> {
    let dt = spec.dt();
    let len = spec.t1 - spec.t0;
    let mut out = Vec::new();
    let mut k = 0u32;
    loop {
        let u = ((1u64 << k) as f64 + 0.5) * dt;
        if u > len {
            break;
        }
        out.push(u);
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpec;

    /// Deterministic filler decoupled from any grid symmetry.
    fn scrambled(i: usize, x: usize) -> f64 {
        let s = (i * 2654435761 + x * 40503 + 9973) % 1000;
        s as f64 / 250.0 - 2.0
    }

    fn naive_max_x(g: &SpaceTimeScalar, radii: &[f64]) -> Array2<f64> {
        let spec = &g.spec;
        let n = spec.n_space();
        let h = spec.h();
        let mut out = Array2::zeros((spec.nt, n));
        for i in 0..spec.nt {
            for x in 0..n {
                let xi = spec.unflatten(x);
                let mut best = g.values[(i, x)].abs();
                for &r in radii {
                    let mut sum = 0.0;
                    let mut count = 0usize;
                    for y in 0..n {
                        let yi = spec.unflatten(y);
                        let mut d2 = 0.0;
                        for a in 0..spec.d {
                            let o = xi[a].abs_diff(yi[a]);
                            let w = o.min(spec.nx - o) as f64 * h;
                            d2 += w * w;
                        }
                        if d2.sqrt() < r {
                            sum += g.values[(i, y)].abs();
                            count += 1;
                        }
                    }
                    best = best.max(sum / count as f64);
                }
                out[(i, x)] = best;
            }
        }
        out
    }

    #[test]
    fn spatial_maximal_matches_direct_sums_in_2d() {
        let spec = GridSpec::new(2, 1.0, 8, 3, 0.0, 1.0, 1).unwrap();
        let n = spec.n_space();
        let mut values = Array2::zeros((spec.nt, n));
        for i in 0..spec.nt {
            for x in 0..n {
                values[(i, x)] = scrambled(i, x);
            }
        }
        let g = SpaceTimeScalar::new(spec.clone(), values).unwrap();
        let h = spec.h();
        let radii = [0.9 * h, 2.3 * h, 3.7 * h];
        let fast = maximal_x(&g, &radii).unwrap();
        let slow = naive_max_x(&g, &radii);
        for (a, b) in fast.values.iter().zip(slow.iter()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn time_maximal_matches_direct_sums() {
        let spec = GridSpec::new(1, 1.0, 4, 16, 0.0, 2.0, 1).unwrap();
        let n = spec.n_space();
        let mut values = Array2::zeros((spec.nt, n));
        for i in 0..spec.nt {
            for x in 0..n {
                values[(i, x)] = scrambled(i, x);
            }
        }
        let g = SpaceTimeScalar::new(spec.clone(), values).unwrap();
        let dt = spec.dt();
        let widths = [0.5 * dt, 3.5 * dt, 10.0 * dt];
        let fast = maximal_t(&g, &widths).unwrap();
        for i in 0..spec.nt {
            for x in 0..n {
                let mut best = g.values[(i, x)].abs();
                for &u in &widths {
                    let k = (u / dt).ceil() as i64 - 1;
                    let mut sum = 0.0;
                    for j in i as i64 - k..=i as i64 + k {
                        if j >= 0 && (j as usize) < spec.nt {
                            sum += g.values[(j as usize, x)].abs();
                        }
                    }
                    best = best.max(sum / (2 * k + 1) as f64);
                }
                let got = fast.values[(i, x)];
                assert!((got - best).abs() < 1e-12, "i={i} x={x}: {got} vs {best}");
            }
        }
    }

    #[test]
    fn constants_are_fixed_points() {
        let spec = GridSpec::new(2, 1.0, 8, 5, 0.0, 1.0, 1).unwrap();
        let values = Array2::from_elem((spec.nt, spec.n_space()), 0.7);
        let g = SpaceTimeScalar::new(spec.clone(), values).unwrap();
        let mx = maximal_x(&g, &dyadic_radii(&spec)).unwrap();
        let mt = maximal_t(&g, &dyadic_widths(&spec)).unwrap();
        for (&a, &b) in mx.values.iter().zip(mt.values.iter()) {
            assert!((a - 0.7).abs() < 1e-12);
            assert!((b - 0.7).abs() < 1e-15);
        }
    }

    #[test]
    fn time_spike_spreads_by_the_window_count() {
        let spec = GridSpec::new(1, 1.0, 8, 9, 0.0, 1.0, 1).unwrap();
        let n = spec.n_space();
        let mut values = Array2::zeros((spec.nt, n));
        for x in 0..n {
            values[(4, x)] = 2.7;
        }
        let g = SpaceTimeScalar::new(spec.clone(), values).unwrap();
        let dt = spec.dt();
        let m = maximal_t(&g, &[3.5 * dt]).unwrap();
        // window (t - 3.5 dt, t + 3.5 dt) holds 7 samples
        assert!((m.values[(2, 0)] - 2.7 / 7.0).abs() < 1e-15);
        assert!((m.values[(4, 0)] - 2.7).abs() < 1e-15);
        assert_eq!(m.values[(0, 0)], 0.0);
    }

    #[test]
    fn plateau_indicator_peaks_at_the_geometric_ratio() {
        // g = 1 on (-1, 1) in the box [-4, 4): at x = 2 the best ball is
        // r = 3, capturing mass ratio (1/3 in the continuum).
        let spec = GridSpec::new(1, 4.0, 512, 1, 0.0, 1.0, 1).unwrap();
        let n = spec.n_space();
        let h = spec.h();
        let mut values = Array2::zeros((1, n));
        for x in 0..n {
            if spec.coord(x).abs() < 1.0 {
                values[(0, x)] = 1.0;
            }
        }
        let g = SpaceTimeScalar::new(spec.clone(), values).unwrap();
        let radii: Vec<f64> = (1..=1000).map(|k| k as f64 * 0.5 * h).collect();
        let m = maximal_x(&g, &radii).unwrap();
        let at = spec.flatten(&[(6.0 / h).round() as usize]);
        assert!((spec.coord(at) - 2.0).abs() < 1e-12);
        assert!((m.values[(0, at)] - 1.0 / 3.0).abs() < 0.01, "{}", m.values[(0, at)]);
    }

    #[test]
    fn dyadic_scales_are_sane() {
        let spec = GridSpec::new(1, 4.0, 64, 16, 0.0, 2.0, 1).unwrap();
        let radii = dyadic_radii(&spec);
        let widths = dyadic_widths(&spec);
        assert!((radii[0] - 1.5 * spec.h()).abs() < 1e-15);
        assert!((widths[0] - 1.5 * spec.dt()).abs() < 1e-15);
        assert!(radii.windows(2).all(|w| w[1] > w[0]));
        assert!(*radii.last().unwrap() <= spec.l);
        assert!(*widths.last().unwrap() <= spec.t1 - spec.t0);
    }

    #[test]
    fn scale_lists_are_validated() {
        let spec = GridSpec::new(1, 1.0, 8, 2, 0.0, 1.0, 1).unwrap();
        let g = SpaceTimeScalar::zeros(spec);
        assert!(maximal_x(&g, &[]).is_err());
        assert!(maximal_x(&g, &[-0.5]).is_err());
        assert!(maximal_t(&g, &[0.0]).is_err());
    }
}
