use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Amplitude or norm escaping the truncated Fock space exceeds tolerance.
    Truncation {
        dim: usize,
        leakage: f64,
    },
    DimensionMismatch {
        left: usize,
        right: usize,
    },
    /// The requested state is the zero vector (e.g. odd cat with `alpha = 0`).
    DegenerateState(&'static str),
    /// Heralding probability below the resolvable floor.
    ZeroProbability {
        probability: f64,
    },
    SingularParameter(&'static str),
    InvalidParam(String),
    /// A conditioning matrix is too ill-conditioned to invert reliably.
    NumericalSingularity {
        condition: f64,
    },
    GridMismatch,
    /// Hermite sums beyond this order are not evaluated.
    OverflowGuard {
        order: u32,
        max: u32,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Truncation { dim, leakage } => {
                write!(
                    f,
                    "insufficient Fock dimension {dim}: leakage {leakage:.3e}"
                )
            }
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::DegenerateState(what) => write!(f, "degenerate state: {what}"),
            Error::ZeroProbability { probability } => {
                write!(
                    f,
                    "heralding probability {probability:.3e} is effectively zero"
                )
            }
            Error::SingularParameter(what) => write!(f, "singular parameter: {what}"),
            Error::InvalidParam(what) => write!(f, "invalid parameter: {what}"),
            Error::NumericalSingularity { condition } => {
                write!(
                    f,
                    "ill-conditioned matrix (condition number {condition:.3e})"
                )
            }
            Error::GridMismatch => f.write_str("phase-space grids do not match"),
            Error::OverflowGuard { order, max } => {
                write!(f, "order {order} exceeds supported maximum {max}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParam(msg.into())
}
