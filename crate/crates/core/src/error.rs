//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("unknown catalog entry `{0}`")]
    UnknownChart(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("point {0:?} is outside the open chart domain")]
    OutsideDomain([f64; 2]),
    #[error("curvature is unbounded at {0:?}")]
    Unbounded([f64; 2]),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("no sign change: {0}")]
    NoBracket(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("operation requires a surface of revolution")]
    NotRevolution,
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("flow failed: {0}")]
    Flow(String),
    #[error("expression error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("not found: {0}")]
    NotFound(String),
}

pub type Result<T> = std::result::Result<T, GeoError>;
