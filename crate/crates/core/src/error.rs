use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("photon cutoff {cutoff} exceeded by occupation {occupation:?}")]
    CutoffExceeded { cutoff: u32, occupation: Vec<u32> },
    #[error("dimension mismatch: expected {expected} modes, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cutoff mismatch: {0} vs {1}")]
    CutoffMismatch(u32, u32),
    #[error("mode index {index} out of range for {mode_count} modes")]
    ModeOutOfRange { index: usize, mode_count: usize },
    #[error("state has zero norm")]
    ZeroState,
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("all pump amplitudes are zero")]
    AllArmsDark,
    #[error("state norm {norm} deviates from 1 by more than {tolerance}")]
    NotNormalized { norm: f64, tolerance: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
