use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the numerical routines.
///
/// Variants split into input/contract violations (see [`Error::is_validation`])
/// and numerical failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("spectrum of A is not purely imaginary (max |Re λ| = {max_real_part:e}, tolerance {tolerance:e})")]
    NotPurelyImaginary { max_real_part: f64, tolerance: f64 },

    #[error("spectrum not simple: {0}")]
    SpectrumNotSimple(String),

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("matrix exponential overflow: ‖A·t‖₁ = {norm:e}")]
    Overflow { norm: f64 },

    #[error("quadrature did not reach tolerance within {panels} panels (best value {best}, residual {residual:e})")]
    QuadratureFailed { best: f64, residual: f64, panels: usize },

    #[error("trajectory passes near origin; mean motion undefined on this path (|z| = {abs_z:e} at t = {t})")]
    NearOrigin { t: f64, abs_z: f64 },

    #[error("resonance search too large: {candidates} candidates exceeds cap {cap}; use a smaller bound")]
    WorkCap { candidates: f64, cap: f64 },

    #[error("two-oscillator bounds inapplicable: {0}")]
    Inapplicable(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by inputs that violate an operation's preconditions.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::NotPurelyImaginary { .. }
                | Error::SpectrumNotSimple(_)
                | Error::WorkCap { .. }
                | Error::Inapplicable(_)
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
