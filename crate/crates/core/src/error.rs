use thiserror::Error;

use crate::spectral::GridSpec;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: GridSpec, right: GridSpec },

    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("component mismatch: expected {expected}, found {found}")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("blowup detected at t = {time}: {reason}")]
    BlowupDetected { time: f64, reason: String },

    #[error("grid too coarse: cutoff {cutoff} exceeds the Nyquist frequency {nyquist}")]
    GridTooCoarse { cutoff: f64, nyquist: f64 },

    #[error("iteration failed to contract: ratio {ratio} at iteration {iteration}")]
    NonContraction { iteration: usize, ratio: f64 },

    #[error("CFL violation: dt * N * max|A| = {number} exceeds {limit}")]
    CflViolation { number: f64, limit: f64 },

    #[error("unknown system '{0}'")]
    UnknownSystem(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
