use num_complex::Complex64;
use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("pole of the gamma function at z = {0}")]
    Pole(Complex64),

    #[error("series did not converge: {0}")]
    NonConvergence(String),

    #[error("quadrature tolerance not met: best estimate {value} with error {error:e}")]
    ToleranceNotMet { value: Complex64, error: f64 },

    #[error("mode cannot be normalized: {0}")]
    NonNormalizable(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unphysical covariance matrix: {0}")]
    Unphysical(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
