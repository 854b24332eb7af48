//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("spin index {spin} out of range for {nspins} spins")]
    SpinOutOfRange { spin: usize, nspins: usize },

    #[error("register size {0} exceeds the supported maximum of {max} spins", max = crate::MAX_SPINS)]
    TooManySpins(usize),

    #[error("value is not finite")]
    NonFinite,

    #[error("state vector norm {0} deviates from 1 beyond tolerance")]
    NotNormalized(f64),

    #[error("matrix is not unitary (max |U U+ - I| = {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (max |M - M+| = {0:.3e})")]
    NotHermitian(f64),

    #[error("density operator trace {0} deviates from 1 beyond tolerance")]
    BadTrace(f64),

    #[error("density operator is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("pulse axis must be transverse (+x, -x, +y or -y), got {0}")]
    NonTransverseAxis(String),

    #[error("pulse angle {0} outside (0, 2*pi]")]
    InvalidPulseAngle(f64),

    #[error("delay duration {0} is negative or not finite")]
    InvalidDuration(f64),

    #[error("angle must be positive, got {0}")]
    NonpositiveAngle(f64),

    #[error("coupling constant must be positive, got {0} Hz")]
    NonpositiveCoupling(f64),

    #[error("no calibration for channel {0}")]
    UnknownChannel(u32),

    #[error("duplicate channel {0} in spin system")]
    DuplicateChannel(u32),

    #[error("spins {0} and {1} are not coupled")]
    NotCoupled(usize, usize),

    #[error("control and target must differ, got spin {0} for both")]
    ControlEqualsTarget(usize),

    #[error("gates within a layer must act on disjoint spins")]
    OverlappingLayer,

    #[error("permutation {0:?} is not a bijection")]
    NotABijection(Vec<usize>),

    #[error("frame has {got} bits but the switch has {want} ports")]
    FrameLengthMismatch { got: usize, want: usize },

    #[error("state is superposed: largest basis probability {0} below threshold")]
    SuperposedState(f64),

    #[error("pulse mode requires a spin system with {want} spins, got {got}")]
    SystemSizeMismatch { got: usize, want: usize },

    #[error("invalid acquisition parameters: {0}")]
    InvalidAcquisition(String),

    #[error("FID record has no samples")]
    EmptyFid,

    #[error("spectrum has no bins")]
    EmptySpectrum,

    #[error("peak threshold {0} outside (0, 1)")]
    InvalidThreshold(f64),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
