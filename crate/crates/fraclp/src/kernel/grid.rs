//! Kernel evaluation by summing the truncated Fourier lattice
//! `Δξ^d Σ_k m(|ξ_k|) cos(ξ_{k,1} r)` with `ξ_k = (π/L) k`,
//! `k ∈ [-Nx/2, Nx/2)^d`.
//!
//! By Poisson summation this computes the 2L-periodized kernel exactly up to
//! band truncation, so its two error sources are the periodization images at
//! distance ≥ 2L - r and the spectral tail beyond `ξ_max = πNx/(2L)`. The
//! reported `err_estimate` probes both by re-summing on the half-resolution
//! sublattice (twice the image contamination) and on the half band.
//!
//! Points are evaluated on the first coordinate axis `x = r·e₁`; the kernel
//! is radial, so this is general. Precomputing the partial sums
//! `S(k₁) = Σ_{k_rest} m(|ξ_k|)` makes each radius an O(Nx) cosine sum.

use super::{KernelSample, Method, TAIL_EXPONENT};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Tuned lattice sizes `(L, Nx)` giving relative accuracy comfortably below
/// 1e-5 (d=1) / 1e-4 (d≥2) for radii up to 5 at t = 1.
pub fn defaults(d: usize, alpha: f64) -> Option<(f64, usize)> {
    match (d, alpha) {
        (1, a) if a == 0.5 => Some((48_000.0, 1 << 22)),
        (1, a) if a == 1.0 => Some((3_200.0, 1 << 15)),
        (1, a) if a == 1.5 => Some((1_000.0, 8_192)),
        (2, a) if a == 1.0 => Some((260.0, 2_048)),
        (3, a) if a == 1.0 => Some((88.0, 160)),
        _ => None,
    }
}

/// Precomputed lattice tables for one parameter set.
#[derive(Debug, Clone)]
pub struct GridKernel {
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
    pub t: f64,
    pub l: f64,
    pub nx: usize,
    dxi: f64,
    /// Σ over the transverse lattice, indexed by the signed k₁ offset + Nx/2.
    s_full: Vec<f64>,
    /// Same with every |k_j| ≤ Nx/4 (band-truncation probe).
    s_half: Vec<f64>,
    /// Half-resolution sublattice, spacing 2Δξ (periodization probe).
    s_even: Vec<f64>,
}

impl GridKernel {
    pub fn build(d: usize, alpha: f64, beta: f64, t: f64, l: f64, nx: usize) -> Result<Self> {
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
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidParam {
                name: "l",
                value: l,
                reason: "half-period must be finite and > 0",
            });
        }
        if nx < 8 || nx % 4 != 0 {
            return Err(Error::InvalidGrid(format!(
                "lattice size {nx} must be a multiple of 4 and at least 8"
            )));
        }

        let ct = (2.0 * PI).powf(alpha) * t;
        let pre = t.powf(beta / alpha);
        let dxi = PI / l;
        let m = |xi2: f64| -> f64 {
            let rho = xi2.sqrt();
            pre * rho.powf(beta) * (-ct * rho.powf(alpha)).exp()
        };

        let half = (nx / 2) as i64;
        let quarter = (nx / 4) as i64;
        let nxe = nx / 2;
        let halfe = (nxe / 2) as i64;
        let dxe = 2.0 * dxi;

        let mut s_full = vec![0.0f64; nx];
        let mut s_half = vec![0.0f64; nx];
        let mut s_even = vec![0.0f64; nxe];

        // Transverse partial sums; explicit per-dimension loops keep the hot
        // path free of recursion.
        match d {
            1 => {
                for k1 in -half..half {
                    let xi1 = dxi * k1 as f64;
                    let v = m(xi1 * xi1);
                    s_full[(k1 + half) as usize] = v;
                    if -quarter <= k1 && k1 < quarter {
                        s_half[(k1 + half) as usize] = v;
                    }
                }
                for k1 in -halfe..halfe {
                    let xi1 = dxe * k1 as f64;
                    s_even[(k1 + halfe) as usize] = m(xi1 * xi1);
                }
            }
            2 => {
                for k1 in -half..half {
                    let x1 = dxi * k1 as f64;
                    let (mut sf, mut sh) = (crate::sum::Accum::new(), crate::sum::Accum::new());
                    for k2 in -half..half {
                        let x2 = dxi * k2 as f64;
                        let v = m(x1 * x1 + x2 * x2);
                        sf.add(v);
                        if -quarter <= k2 && k2 < quarter {
                            sh.add(v);
                        }
                    }
                    s_full[(k1 + half) as usize] = sf.value();
                    if -quarter <= k1 && k1 < quarter {
                        s_half[(k1 + half) as usize] = sh.value();
                    }
                }
                for k1 in -halfe..halfe {
                    let x1 = dxe * k1 as f64;
                    let mut se = crate::sum::Accum::new();
                    for k2 in -halfe..halfe {
                        let x2 = dxe * k2 as f64;
                        se.add(m(x1 * x1 + x2 * x2));
                    }
                    s_even[(k1 + halfe) as usize] = se.value();
                }
            }
            _ => {
                for k1 in -half..half {
                    let x1 = dxi * k1 as f64;
                    let (mut sf, mut sh) = (crate::sum::Accum::new(), crate::sum::Accum::new());
                    for k2 in -half..half {
                        let x2 = dxi * k2 as f64;
                        for k3 in -half..half {
                            let x3 = dxi * k3 as f64;
                            let v = m(x1 * x1 + x2 * x2 + x3 * x3);
                            sf.add(v);
                            if -quarter <= k2 && k2 < quarter && -quarter <= k3 && k3 < quarter {
                                sh.add(v);
                            }
                        }
                    }
                    s_full[(k1 + half) as usize] = sf.value();
                    if -quarter <= k1 && k1 < quarter {
                        s_half[(k1 + half) as usize] = sh.value();
                    }
                }
                for k1 in -halfe..halfe {
                    let x1 = dxe * k1 as f64;
                    let mut se = crate::sum::Accum::new();
                    for k2 in -halfe..halfe {
                        let x2 = dxe * k2 as f64;
                        for k3 in -halfe..halfe {
                            let x3 = dxe * k3 as f64;
                            se.add(m(x1 * x1 + x2 * x2 + x3 * x3));
                        }
                    }
                    s_even[(k1 + halfe) as usize] = se.value();
                }
            }
        }

        // Sanity: the band must actually contain the symbol's support.
        let band_decay = ct * (dxi * half as f64).powf(alpha);
        if band_decay < 0.5 * TAIL_EXPONENT {
            log::warn!(
                "lattice band edge keeps e^{{-{band_decay:.1}}} of the symbol; \
                 truncation may dominate (L={l}, Nx={nx})"
            );
        }

        Ok(GridKernel {
            d,
            alpha,
            beta,
            t,
            l,
            nx,
            dxi,
            s_full,
            s_half,
            s_even,
        })
    }

    /// Evaluate the periodized kernel at `x = r·e₁`.
    pub fn eval(&self, r: f64) -> KernelSample {
        let half = (self.nx / 2) as i64;
        let quarter = (self.nx / 4) as i64;
        let nxe = self.nx / 2;
        let halfe = (nxe / 2) as i64;
        let dxe = 2.0 * self.dxi;
        let meas = self.dxi.powi(self.d as i32);
        let meas_e = dxe.powi(self.d as i32);

        let (mut v, mut vh) = (crate::sum::Accum::new(), crate::sum::Accum::new());
        for k1 in -half..half {
            let c = (self.dxi * k1 as f64 * r).cos();
            v.add(self.s_full[(k1 + half) as usize] * c);
            if -quarter <= k1 && k1 < quarter {
                vh.add(self.s_half[(k1 + half) as usize] * c);
            }
        }
        let mut ve = crate::sum::Accum::new();
        for k1 in -halfe..halfe {
            let c = (dxe * k1 as f64 * r).cos();
            ve.add(self.s_even[(k1 + halfe) as usize] * c);
        }

        let value = meas * v.value();
        let v_half = meas * vh.value();
        let v_even = meas_e * ve.value();
        KernelSample {
            r,
            value,
            err_estimate: (value - v_even).abs() + (value - v_half).abs(),
            method: Method::GridFourier,
        }
    }
}
