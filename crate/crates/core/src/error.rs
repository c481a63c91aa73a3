use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("level {level} exceeds the supported maximum {max}")]
    LevelTooDeep { level: usize, max: usize },
    #[error("point ({x1}, {x2}) lies outside {domain}")]
    Outside { x1: f64, x2: f64, domain: &'static str },
    #[error("interpolation parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("sign code must be non-empty")]
    EmptyCode,
    #[error("sign code entries must be ±1, got {0}")]
    InvalidSign(i8),
    #[error("cannot parse sign code {0:?}")]
    InvalidCode(String),
    #[error("code lengths differ: alpha has {alpha}, beta has {beta}")]
    CodeLengthMismatch { alpha: usize, beta: usize },
    #[error("rectangle has lo > hi")]
    InvalidRect,
    #[error("gradient undefined at ({x1}, {x2}): point lies on a seam")]
    Seam { x1: f64, x2: f64 },
    #[error("target point is within {distance:e} of the boundary image")]
    TooCloseToImage { distance: f64 },
    #[error("{what} did not converge: {detail}")]
    NonConvergent { what: &'static str, detail: String },
    #[error("test function support meets the image of the boundary")]
    SupportViolation,
    #[error("quadrature error estimate {estimate:e} above tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },
    #[error("window escapes the domain: {0}")]
    WindowOutsideDomain(String),
    #[error("map level {level} too shallow for scale index {scale}")]
    InsufficientDepth { level: usize, scale: u32 },
    #[error("map {0} has no inverse available")]
    NoInverse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
