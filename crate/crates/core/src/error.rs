//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by spectrum I/O, preprocessing, model evaluation and fitting.
#[derive(Debug, Error)]
pub enum Error {
    /// A data file row could not be parsed. Line numbers are 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Fewer samples than an operation needs.
    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// An input violates a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A numeric argument is outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// No usable peak in a spectrum (e.g. global maximum sits on an endpoint).
    #[error("no peak: {0}")]
    NoPeak(String),

    /// A peak was found but a half-maximum crossing is missing on one side.
    #[error("incomplete peak: {0}")]
    IncompletePeak(String),

    /// A regression problem is rank deficient (e.g. all abscissae equal).
    #[error("rank deficiency: {0}")]
    RankDeficient(String),

    /// Stokes/anti-Stokes ratio incompatible with a finite positive temperature.
    #[error("nonphysical ratio {ratio} for gamma coefficient {gamma_coeff}")]
    NonphysicalRatio { ratio: f64, gamma_coeff: f64 },

    /// Absorption-table lookup failed.
    #[error("no absorption coefficient tabulated for wavelength {wavelength_key} nm")]
    MissingAbsorption { wavelength_key: String },

    /// A fit produced no usable solution (e.g. all NNLS weights zero).
    #[error("no fit: {0}")]
    NoFit(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
