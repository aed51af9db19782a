use crate::quad::Mode;

/// Errors raised by circuit construction and parameter validation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("beam splitter / amplifier needs two distinct modes, got {0:?} twice")]
    EqualModes(Mode),

    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("squeezing parameter must be nonnegative, got {0}")]
    NegativeSqueezing(f64),

    #[error("line transmission eta must lie in (0, 1], got {0}")]
    TransmissionOutOfRange(f64),

    #[error("excess noise delta must be nonnegative, got {0}")]
    NegativeExcessNoise(f64),

    #[error("cloning circuit requires delta < 2*eta, got delta = {delta}, eta = {eta}")]
    ExcessNoiseTooLarge { eta: f64, delta: f64 },

    #[error("modulation variance v_a must be positive, got {0}")]
    NonPositiveModulation(f64),

    #[error("sample count must be at least 1000, got {0}")]
    TooFewSamples(u64),

    #[error("covariance matrix must be symmetric (asymmetry {0:e})")]
    AsymmetricCovariance(f64),

    #[error("covariance matrix must be positive semidefinite (min eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("sweep needs 0 <= delta_min < delta_max, got [{min}, {max}]")]
    BadSweepRange { min: f64, max: f64 },

    #[error("sweep needs at least 2 steps, got {0}")]
    TooFewSteps(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
