use num_complex::Complex64;
use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("root finder did not converge: {0}")]
    NonConvergence(String),

    #[error("level-curve radius {radius} too small: {detail}")]
    RadiusTooSmall { radius: f64, detail: String },

    #[error("orbit escaped overflow bounds at step {step}")]
    Escaped { step: usize },

    #[error("shift witness does not reproduce the window (distance {distance:.3e} > tol {tol:.3e})")]
    WitnessMismatch { distance: f64, tol: f64 },

    #[error("no preimage of the window found in the search region")]
    NoPreimage,

    #[error("ambiguous image: {clusters} solution clusters disagree at P^M by {spread:.3e}")]
    AmbiguousImage { clusters: usize, spread: f64 },

    #[error("estimate did not stabilize: {0}")]
    Unstable(String),

    #[error("insufficient samples: {have} available, {need} needed ({context})")]
    InsufficientSamples {
        have: usize,
        need: usize,
        context: String,
    },

    #[error("sector constant c too small: {0}")]
    CTooSmall(String),

    #[error("certificate '{clause}' failed at witness ({}, {})", witness.re, witness.im)]
    CertificateFailed { clause: String, witness: Complex64 },

    #[error("inverse branch left the target sector at step {step}")]
    BranchMiss { step: usize },

    #[error("orbit left the sector cover at step {step}")]
    EscapedJulia { step: usize },

    #[error("radius {radius} not yet asymptotic: pair deviation {deviation:.3e} grew past {bound:.3e}")]
    PrematureRadius {
        radius: f64,
        deviation: f64,
        bound: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
