use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient list is empty")]
    EmptyCoefficients,

    #[error("coefficient c[{index}] is not finite")]
    NonFiniteCoefficient { index: usize },

    #[error("squeezing parameter must satisfy 0 <= lambda < 1, got {0}")]
    InvalidLambda(f64),

    #[error("circle radius must be finite and nonnegative, got {0}")]
    InvalidRadius(f64),

    #[error("coefficient magnitudes overflow f64 for the requested parameters")]
    CoefficientOverflow,

    #[error("outcome index {mu} out of range for resolution s={s}")]
    OutcomeOutOfRange { mu: usize, s: usize },

    #[error("resolution mismatch: scheme built for s={scheme_s}, measurement has s={dist_s}")]
    ResolutionMismatch { scheme_s: usize, dist_s: usize },

    #[error("invalid binning scheme: {0}")]
    InvalidScheme(String),

    #[error("state has no support on n <= s (zero retained mass)")]
    ZeroMass,

    #[error("probability {0} is below the negative-roundoff floor")]
    NegativeProbability(f64),

    #[error("coefficient file line {line}: {msg}")]
    CoeffFileParse { line: usize, msg: String },

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),
}
