use thiserror::Error;

/// Which side of the load range a saddle-point search fell off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Requested load is below every value of α(λ, q) on the scanned range (q → 0).
    BelowRange,
    /// Requested load is above every value of α(λ, q): at or over capacity (q → 1).
    AboveRange,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::BelowRange => write!(f, "below range, overlap q -> 0"),
            Regime::AboveRange => write!(f, "at or over capacity, overlap q -> 1"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid replica point: {0}")]
    InvalidPoint(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series truncation needs {needed} terms, cap is {cap}")]
    TruncationFailure { needed: f64, cap: usize },

    #[error("quadrature did not converge: estimated error {error:e} above target {target:e}")]
    QuadratureNonconvergence { error: f64, target: f64 },

    #[error("integral of Phi/Psi is {value:e}, expected strictly negative")]
    SignViolation { value: f64 },

    #[error("no bracket for alpha = {alpha} at lambda = {lambda}: {regime}")]
    NoBracket { lambda: f64, alpha: f64, regime: Regime },

    #[error("digamma pole at z = {0}")]
    Pole(f64),

    #[error("dimension {n} exceeds the dense-simulation cap {cap}")]
    DimensionCap { n: usize, cap: usize },

    #[error("unsupported activation: {0}")]
    UnsupportedActivation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
