//! Numerical toolkit for the fractional heat semigroup `T_t = exp(-t(-Δ)^{α/2})`
//! on periodic grids, the α-stable transition kernels behind it, and the
//! parabolic Littlewood-Paley square function built from scaled convolutions.
//!
//! The crate is organized around one pipeline:
//!
//! * [`field`]: space-time fields on a periodic box with rectangle-rule norms,
//! * [`spectral`]: FFT-based Fourier multipliers (fractional Laplacian, semigroup),
//! * [`kernel`]: pointwise kernel evaluation by three independent routes
//!   (rotated-contour quadrature in 1-d, radial Bessel quadrature in 2-d/3-d,
//!   truncated Fourier lattice sums), plus decay and envelope certificates,
//! * [`sqop`]: the square function `G_a f`, maximal averages, and the parabolic
//!   sharp function,
//! * [`verify`]: statistical campaigns that measure the square-function norm
//!   ratios and the pointwise sharp-function estimate,
//! * [`spde`]: a spectral Euler scheme for the stochastic heat equation driven
//!   by multi-channel noise, with an exact second-moment oracle.
//!
//! Two Fourier conventions are supported throughout; see
//! [`spectral::Convention`] for the exact normalization contract.

pub mod error;
pub mod field;
pub mod kernel;
pub mod quad;
pub mod spde;
pub mod spectral;
pub mod sqop;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
