use thiserror::Error;

/// Errors raised by the covariance-matrix calculus.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CmError {
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e}, tolerance {tolerance:e})")]
    NotSymmetric { asymmetry: f64, tolerance: f64 },
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },
    #[error("matrix is not positive definite (min eigenvalue {min_eig:e})")]
    NotPd { min_eig: f64 },
    #[error("covariance matrix is not bona fide (min symplectic eigenvalue {nu_min})")]
    NotBonaFide { nu_min: f64 },
    #[error("invalid index set: {0}")]
    BadIndexSet(String),
    #[error("unknown party `{0}`")]
    UnknownParty(String),
    #[error("party label `{0}` appears more than once")]
    LabelClash(String),
    #[error("invalid mode partition: {0}")]
    InvalidPartition(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("Renyi order alpha = {0} is outside the supported range")]
    BadAlpha(f64),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, CmError>;
