//! Numerical toolkit for self-similar solutions of fully nonlinear
//! curvature flows in warped product spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`symfunc`]: symmetric curvature functions, their cones and structural
//!   inequalities;
//! * [`ambient`]: warped product ambients and their curvature quantities;
//! * [`rotgeo`]: rotationally symmetric hypersurfaces and geometric identity checks;
//! * [`soliton`]: the rotational soliton ODE, shooting, scans and the
//!   decomposition of the elliptic operator applied to the auxiliary function;
//! * [`cli`]: the command-line front end.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambient;
pub mod cli;
pub mod error;
pub mod expr;
pub mod jet;
pub mod numeric;
pub mod rotgeo;
pub mod soliton;
pub mod symfunc;

pub use error::{Error, Result};
