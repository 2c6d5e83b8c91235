use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),

    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid Pauli string {0:?}")]
    ParsePauli(String),

    #[error("operators {0} and {1} do not commute")]
    NonCommuting(String, String),

    #[error("stabilizer projector annihilates the seed basis state {0}")]
    ZeroProjection(usize),

    #[error("error spaces overlap (max overlap {0:.3e})")]
    OverlappingErrorSpaces(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("trace drifted to {trace} at t = {time}; reduce dt")]
    TraceDrift { trace: f64, time: f64 },

    #[error("total jump weight {0} at a jump event is not positive")]
    ZeroJumpRate(f64),

    #[error("probability {0} outside [0, 1] beyond tolerance")]
    ProbabilityOutOfRange(f64),

    #[error("scenario {scenario} at gamma = {gamma}: {source}")]
    Scenario {
        scenario: String,
        gamma: f64,
        source: Box<Error>,
    },
}

impl Error {
    /// Innermost error, with scenario context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Scenario { source, .. } => source.root(),
            other => other,
        }
    }

    /// Failures of the integrators rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::TraceDrift { .. } | Error::ZeroJumpRate(_) | Error::ProbabilityOutOfRange(_) | Error::NotNormalized(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
