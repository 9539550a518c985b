use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("basis change matrix is singular (|det P| = {det:e})")]
    SingularFrame { det: f64 },

    #[error("matrix is not a proper rotation (orthogonality defect {orthogonality:e}, det {det})")]
    NotARotation { orthogonality: f64, det: f64 },

    #[error("angular block is not skew-symmetric (max asymmetry {asymmetry:e})")]
    NotSkew { asymmetry: f64 },

    #[error("mass must be positive, got {mass}")]
    NonpositiveMass { mass: f64 },

    #[error("finite difference along coordinate {coord} at {point:?} leaves the field domain")]
    DifferentiationFailure { coord: usize, point: Vec<f64> },

    #[error("degenerate curve tangent (|dpsi/ds| = {norm:e})")]
    DegenerateTangent { norm: f64 },

    #[error("curve is not parameterized by arclength (|dpsi/ds| = {norm})")]
    NotArclength { norm: f64 },

    #[error("surface metric is singular (det a = {det:e})")]
    SingularMetric { det: f64 },

    #[error("cross-section has no quadrature nodes")]
    EmptySection,

    #[error("errors do not decrease under step refinement: {errors:?}")]
    NonMonotone { steps: Vec<f64>, errors: Vec<f64> },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
