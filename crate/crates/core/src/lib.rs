//! Geodesics, periods, curvature flow, sweepouts and toric quotient metrics
//! on incomplete two-spheres.

pub mod acceptance;
pub mod cli;
pub mod counterexample;
pub mod curve;
pub mod error;
pub mod expr;
pub mod flow;
pub mod geodesic;
pub mod metric;
pub mod period;
pub mod polygon;
pub mod quad;
pub mod scalar;
pub mod sweepout;
pub mod toric;

pub use error::{GeoError, Result};
