use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QtError {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceViolation { trace: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eig:e})")]
    PositivityViolation { min_eig: f64 },

    #[error("vector is not normalized (norm {norm})")]
    NotUnitVector { norm: f64 },

    #[error("numerical failure in {context} (residual {residual:e})")]
    NumericalFailure { context: &'static str, residual: f64 },

    #[error("map is not completely positive (minimum Choi eigenvalue {min_eig:e})")]
    NotCompletelyPositive { min_eig: f64 },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dilations do not describe the same channel (defect {defect:e})")]
    NotSameChannel { defect: f64 },

    #[error("Choi assembly has zero trace")]
    ZeroTrace,

    #[error("certificate failure at stage {stage} (residual {residual:e})")]
    CertificateFailure { stage: &'static str, residual: f64 },
}

impl QtError {
    /// True for errors caused by a numerical routine rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            QtError::NumericalFailure { .. } | QtError::CertificateFailure { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, QtError>;
