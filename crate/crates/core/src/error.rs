use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid source specification: {0}")]
    InvalidSource(String),

    #[error("invalid evolution parameters: {0}")]
    InvalidEvolution(String),

    #[error("state contains non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("cannot normalize a state with zero norm")]
    ZeroNorm,

    #[error("grid or timestamp mismatch: {0}")]
    Mismatch(String),

    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error(
        "propagator under-resolved: m0*W*dx/t = {ratio:.4} exceeds pi \
         (W = {half_width:.4}, dx = {dx:.4e}, t = {t:.4e})"
    )]
    UnderResolved {
        ratio: f64,
        half_width: f64,
        dx: f64,
        t: f64,
    },

    #[error("density is not normalized: integral = {0}")]
    Unnormalized(f64),

    #[error("tail fit rejected: {0}")]
    TailFit(String),

    #[error("test function support exceeds grid: {0}")]
    TestFunctionSupport(String),

    #[error("expansion regime violated: {0}")]
    ExpansionRegime(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
