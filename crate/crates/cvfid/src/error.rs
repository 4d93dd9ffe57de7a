//! Error type shared by all cvfid modules.

use thiserror::Error;

/// Errors produced by state construction, linear-algebra pipelines and the
/// Monte-Carlo estimators.
#[derive(Debug, Clone, Error)]
pub enum CvfidError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown variable label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate variable label `{0}`")]
    DuplicateLabel(String),

    #[error("quantum variable `{0}` has no conjugate partner in the state")]
    UnpairedQuantum(String),

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:.3e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("covariance matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("linear map is singular and cannot be inverted")]
    SingularMap,

    #[error("linear map does not preserve the symplectic form (defect {defect:.3e})")]
    NotSymplectic { defect: f64 },

    #[error("variable `{0}` cannot be measured: {1}")]
    InvalidMeasurement(String, String),

    #[error("Gaussian integral over `{label}` diverges (quadratic coefficient {coefficient:.3e} <= 0)")]
    NonIntegrable { label: String, coefficient: f64 },

    #[error("incompatible variable labels: {0}")]
    LabelConflict(String),

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("ensemble truncation tail bound {bound:.3e} exceeds requested tolerance {tolerance:.3e}")]
    TruncationTail { bound: f64, tolerance: f64 },
}

impl CvfidError {
    pub fn invalid_parameter(name: &'static str, reason: impl Into<String>) -> Self {
        CvfidError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by invalid user input rather than a numerical
    /// failure; the CLI maps these to exit code 2, everything else to 3.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            CvfidError::InvalidParameter { .. }
                | CvfidError::DimensionMismatch { .. }
                | CvfidError::UnknownLabel(_)
                | CvfidError::DuplicateLabel(_)
                | CvfidError::UnpairedQuantum(_)
                | CvfidError::InvalidMeasurement(..)
                | CvfidError::LabelConflict(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, CvfidError>;
