//! Geometric-phase analysis for two-state conical intersections.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ci;
pub mod dynamics;
pub mod effh;
pub mod error;
pub mod fields;
pub mod flux;
pub mod model;
pub mod ode;
pub mod poly;
pub mod quad;
pub mod tracing;
pub mod verify;

pub use error::{Error, Result};
