use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("{what} = {value} must lie strictly inside (0, 1)")]
    KeyRange { what: &'static str, value: f64 },
    #[error("orbit length must be at least 1")]
    EmptyOrbit,
    #[error("series too short: {len} < {min}")]
    SeriesTooShort { len: usize, min: usize },
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("word width {0} unsupported (expected 32 or 64)")]
    BadWordBits(u32),
    #[error("bit count {0} is not a multiple of 8")]
    UnalignedBitCount(u64),
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("image dimensions {0}x{1} invalid")]
    BadDimensions(usize, usize),
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("image has constant pixel value; correlation undefined")]
    ConstantImage,
    #[error("requested {requested} pairs but only {available} available")]
    NotEnoughPairs { requested: usize, available: usize },
    #[error("malformed {format} data: {reason}")]
    MalformedImage {
        format: &'static str,
        reason: String,
    },
    #[error("malformed key file: {0}")]
    MalformedKeys(String),
    #[error("fraction {0} outside (0, 1)")]
    BadFraction(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
