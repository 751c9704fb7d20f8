use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("gap closes at k = {k:?} (min |eigenvalue| = {min_abs_eig:.3e})")]
    Gapless { k: Vec<f64>, min_abs_eig: f64 },
    #[error("symmetry violated: {0}")]
    Symmetry(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("path reconstruction residual {residual:.3e} exceeds tolerance at k = {k:?}")]
    NonConvergence { residual: f64, k: Vec<f64> },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
