//! Geometry and bookkeeping for two sphere-based Kochen–Specker arguments.
//!
//! - [`sphere`]: rays, great circles `C(q)`, tripods and rotations.
//! - [`plane`]: the tangent plane at the north pole and the side-of test.
//! - [`reach`]: certificates that `v(q) = 0` forces `v(p) = 0`.
//! - [`measure`]: derivation traces with case splits, and the two demos.
//! - [`triad`]: finite triad systems and their colourings.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod measure;
pub mod plane;
pub mod reach;
pub mod sphere;
pub mod triad;

pub use sphere::{GeometryError, Ray, Tolerance};
