//! End-to-end verification drivers: seeded field families, the exact
//! square-function energy identity, scaling covariance, empirical `L^p`
//! operator constants, elliptic single-time checks, and pointwise
//! domination by maximal functions. Each driver returns a small report
//! struct with the measured quantities so callers pick their own
//! thresholds.

pub mod families;

mod constants;
mod domination;
mod identity;

pub use constants::{
    classical_gradient_check, elliptic_lp_check, elliptic_square_function, lp_ratio_estimate,
    ConstantEstimate, EllipticReport,
};
pub use domination::{fefferman_stein_ratio, pointwise_sharp_check, SharpDominationReport};
pub use families::{sample_field, FamilyKind, FamilySpec};
pub use identity::{
    l2_identity_check, scaling_check, square_function_constant, IdentityRung, L2IdentityReport,
    ScalingReport,
};
