//! Symmetric functions of principal curvatures: elementary symmetric
//! polynomials, normalized mean curvatures, Gårding-type cones and the
//! catalog of 1-homogeneous curvature speeds.

mod condition;
mod cone;
mod function;
mod kappa;
pub mod sampling;

pub use condition::{check_condition_v, concavity_probe, ConditionFailure, ConditionReport};
pub use cone::{cone_member, cone_member_with_margin, ConeKind, ConeSpec, ConeWitness, Membership};
pub use function::{convex_combine, geometric_combine, inverse_star, CurvatureFunction, FunctionKind};
pub use kappa::{elementary_symmetric, hk, sigma_k, sigma_k_omit, KappaVector};

/// Default tolerance for identity checks.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Default tolerance for derivative checks.
pub const DERIVATIVE_TOL: f64 = 1e-8;
