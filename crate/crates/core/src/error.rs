use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("impedance evaluated at the pole of Foster stage {stage} (s = {s})")]
    PoleEvaluation { stage: usize, s: Complex64 },

    #[error("Cauer synthesis failed at Foster stage {stage}: {reason}")]
    Synthesis { stage: usize, reason: String },

    #[error("ill-conditioned continued fraction: {0}")]
    Conditioning(String),

    #[error("model out of range: {0}")]
    ModelRange(String),

    #[error("operating point did not converge after {iterations} iterations (last step {last_step:e} K)")]
    Convergence { iterations: usize, last_step: f64 },

    #[error("transient diverged at t = {time:e} s")]
    Divergence { time: f64 },

    #[error("harmonic {harmonic} at {frequency} Hz does not fall on a spectrum bin (bin width {bin_width} Hz)")]
    Alignment {
        harmonic: usize,
        frequency: f64,
        bin_width: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
