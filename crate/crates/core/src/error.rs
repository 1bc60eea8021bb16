use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid constant `{name}` = {value}: must be strictly positive and finite")]
    InvalidConstant { name: &'static str, value: f64 },

    #[error("invalid spin {0}: must be a non-negative multiple of 1/2")]
    InvalidSpin(f64),

    #[error("spin {spin} needs dimension {dim}, above the cap of {cap}")]
    Capacity { spin: f64, dim: usize, cap: usize },

    #[error("axis must be a unit vector, got norm {0}")]
    InvalidAxis(f64),

    #[error("degenerate top eigenvalue: gap {gap:e} m below threshold {threshold:e} m")]
    Degenerate { gap: f64, threshold: f64 },

    #[error("shape mismatch: expected length {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("invalid separation {0} m: must be > 0")]
    InvalidSeparation(f64),

    #[error("invalid radius {0} m: must be > 0")]
    InvalidRadius(f64),

    #[error("invalid mass {0} kg: must be > 0")]
    InvalidMass(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("sample rate {rate} Hz is too low: need > {min} Hz")]
    Undersampled { rate: f64, min: f64 },

    #[error("duration {duration} s is too short: need >= {min} s")]
    InsufficientDuration { duration: f64, min: f64 },

    #[error("max lag {max_lag} s exceeds a quarter of the series duration ({limit} s)")]
    InsufficientData { max_lag: f64, limit: f64 },

    #[error("invalid segmentation: {0}")]
    Segmentation(String),

    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),

    #[error("invalid band [{lo}, {hi}] Hz")]
    InvalidBand { lo: f64, hi: f64 },

    #[error("config: {0}")]
    Config(String),
}
