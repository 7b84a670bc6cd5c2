use thiserror::Error;

/// Errors raised by the laboratory operations.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("length {0} is not a power of two >= 8")]
    InvalidLength(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("exponent {0} out of range: {1}")]
    InvalidExponent(f64, &'static str),

    #[error("frequency interval [{lo}, {hi}) is empty or outside [-{half}, {half})")]
    FrequencyOutOfRange { lo: i64, hi: i64, half: i64 },

    #[error("intervals [{0}, {1}) and [{2}, {3}) overlap")]
    Overlap(i64, i64, i64, i64),

    #[error("dyadic interval at level {level} offset {offset} is invalid for n = {n}")]
    InvalidDyadic { level: u32, offset: u64, n: usize },

    #[error("dilation by 2^{0} is incompatible with the signal: {1}")]
    IncompatibleDilation(i32, &'static str),

    #[error("window plateau [{0}, {1}) must lie strictly inside support [{2}, {3})")]
    InvalidWindow(i64, i64, i64, i64),

    #[error("interval of width {width} is too wide for a grid of {n} samples")]
    TooWide { width: i64, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid of {0} cells is too large for exhaustive enumeration")]
    GridTooLarge(usize),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
