//! Teichmüller space of the one-holed torus in Markoff trace coordinates.
//!
//! - [`farey`]: slopes, intersection numbers and the mapping class action.
//! - [`markoff`]: surface points, traces of slopes and geodesic enumeration.
//! - [`geometry`]: angles, twist orbits and the twist flow.
//! - [`series`]: length series with truncation estimates.
//! - [`spectrum`]: systole, counting function and collar checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod farey;
pub mod geometry;
pub mod markoff;
pub mod series;
pub mod spectrum;
pub mod summation;

pub use error::{Error, Result};
pub use farey::{normalize_slope, MappingClass, Slope};
pub use markoff::{make_surface_point, trace_of_slope, GeodesicRecord, Root, SurfacePoint};
