use thiserror::Error;

pub type Result<T> = std::result::Result<T, ChainError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("chain length {n} is invalid: need n >= 8 and n divisible by 4 (quartet grid)")]
    InvalidChainSize { n: usize },

    #[error("coupling j_x must be nonzero")]
    ZeroCoupling,

    #[error("mode spectrum at q = {q} is degenerate (some lambda_i = 0); use the numerical path")]
    DegenerateSpectrum { q: f64 },

    #[error(
        "momentum numerator {numerator} is not an allowed value for n = {n} (odd, in (-n, n))"
    )]
    MomentumNotAllowed { numerator: i64, n: usize },

    #[error("momentum slot {slot} out of range (quartet has slots 0..4)")]
    SlotOutOfRange { slot: usize },

    #[error("incompatible specs: {0}")]
    MismatchedSpecs(String),

    #[error("window length {window} exceeds series length {len}")]
    WindowTooLong { window: usize, len: usize },

    #[error("chain length {n} exceeds the brute-force cap {cap}")]
    SizeCapExceeded { n: usize, cap: usize },

    #[error("empty parameter range")]
    EmptyRange,

    #[error("power-law fit needs {needed}+ strictly positive samples, got {got}")]
    DegenerateFit { needed: usize, got: usize },

    #[error("invalid kick period tau = {tau}: must be positive and finite")]
    InvalidKick { tau: f64 },
}
