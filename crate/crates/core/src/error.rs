use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("matrix is not symplectic (defect {defect:.3e})")]
    NotSymplectic { defect: f64 },
    #[error("singular matrix (|det| = {det:.3e})")]
    Singular { det: f64 },
    #[error("matrix is not symmetric (asymmetry {asym:.3e})")]
    NotSymmetric { asym: f64 },
    #[error("symplectic matrix is not free (|det B| = {det_b:.3e})")]
    NotFree { det_b: f64 },
    #[error("no free factorization found after {attempts} attempts")]
    DecompositionFailed { attempts: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid mismatch between windows")]
    GridMismatch,
    #[error("window has zero norm")]
    ZeroWindow,
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("truncation certificate failed: boundary ring carries {ratio:.3e} of the absolute coefficient sum")]
    Truncation { ratio: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numerical diagnostic failed: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
