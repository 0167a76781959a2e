use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("form degree {k} is not supported in dimension {n}")]
    FormDegree { k: usize, n: usize },

    #[error("value space mismatch: {0}")]
    ValueSpace(&'static str),

    #[error("matrix is not invertible (|det| = {det:e})")]
    Singular { det: f64 },

    #[error("operation undefined here: {0}")]
    Domain(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("curvature values are not in K(g): first Bianchi residual {residual:e}")]
    NotInK { residual: f64 },

    #[error("precondition violated: {what} (residual {residual:e})")]
    Precondition { what: &'static str, residual: f64 },

    #[error("internal consistency failure: {what} (deviation {deviation:e})")]
    Internal { what: &'static str, deviation: f64 },

    #[error("frame degenerates along the ray at t = {t} (|det| = {det:e})")]
    Degenerate { t: f64, det: f64 },

    #[error("point lies outside the admissible radius {radius} (|v| = {norm})")]
    Radius { norm: f64, radius: f64 },
}
