use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("theta matrix is invalid: {reason}")]
    InvalidTheta { reason: String },

    #[error("elements live on different tori (theta mismatch)")]
    ThetaMismatch,

    #[error("axis {axis} out of range for dimension {n}")]
    AxisOutOfRange { axis: usize, n: usize },

    #[error("parameter {name} = {value} outside domain ({domain})")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("matrix has non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("spectral function is not finite at eigenvalue {eigenvalue}")]
    NonFiniteSpectralValue { eigenvalue: f64 },

    #[error("eigenvalue iteration did not converge at index {index}")]
    NoConvergence { index: usize },

    #[error("truncation radius {radius} is smaller than support radius {support}")]
    RadiusTooSmall { radius: usize, support: usize },

    #[error("element is not self-adjoint (defect {defect:e})")]
    NotSelfAdjoint { defect: f64 },

    #[error("potential is not nonpositive (largest eigenvalue {max_eigenvalue:e})")]
    NotNonpositive { max_eigenvalue: f64 },

    #[error("family is not orthonormal (worst defect {defect:e})")]
    NotOrthonormal { defect: f64 },

    #[error("family member {index} has nonzero mean {mean:e}")]
    NonzeroMean { index: usize, mean: f64 },

    #[error("inconsistent exponents p = {p}, q = {q}")]
    Regime { p: f64, q: f64 },

    #[error("invalid instance: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
