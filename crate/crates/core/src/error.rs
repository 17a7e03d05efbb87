use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Number of types below 2 or population size below 1.
    InvalidDimension { types: usize, size: usize },
    /// The lattice for these dimensions does not fit in the index type.
    LatticeTooLarge { types: usize, size: usize },
    InvalidState(String),
    IndexOutOfRange { index: usize, len: usize },
    DimensionMismatch { expected: usize, found: usize },
    InvalidParameter(String),
    InvalidMatrix(String),
    InvalidDistribution(String),
    /// The incentive vanished (or went negative) so reproduction
    /// probabilities cannot be normalized.
    IllDefinedIncentive { state: Option<Vec<u32>>, reason: String },
    Unsupported(String),
    /// A self-loop probability came out negative beyond rounding.
    NumericalInconsistency { state: usize, defect: f64 },
    /// The kernel has more than one communicating class.
    Reducible { recurrent_classes: usize },
    NotConverged { iterations: usize, residual: f64 },
    NotReversible(String),
    TrajectoryTooShort { len: usize },
}

impl Error {
    /// Failures of the numerics themselves rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. } | Error::NumericalInconsistency { .. }
        )
    }

    pub(crate) fn at_state(self, counts: &[u32]) -> Self {
        match self {
            Error::IllDefinedIncentive { state: None, reason } => Error::IllDefinedIncentive {
                state: Some(counts.to_vec()),
                reason,
            },
            other => other,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDimension { types, size } => write!(
                f,
                "invalid dimension: need at least 2 types and population size at least 1, got n={types}, N={size}"
            ),
            Error::LatticeTooLarge { types, size } => {
                write!(f, "state lattice for n={types}, N={size} is too large to index")
            }
            Error::InvalidState(msg) => write!(f, "invalid population state: {msg}"),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "state index {index} out of range for {len} states")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InvalidMatrix(msg) => write!(f, "invalid matrix: {msg}"),
            Error::InvalidDistribution(msg) => write!(f, "invalid distribution: {msg}"),
            Error::IllDefinedIncentive { state: Some(s), reason } => {
                write!(f, "ill-defined incentive at state {s:?}: {reason}")
            }
            Error::IllDefinedIncentive { state: None, reason } => {
                write!(f, "ill-defined incentive: {reason}")
            }
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            Error::NumericalInconsistency { state, defect } => write!(
                f,
                "transition probabilities out of state {state} exceed 1 by {defect:e}"
            ),
            Error::Reducible { recurrent_classes } => write!(
                f,
                "kernel is reducible ({recurrent_classes} recurrent classes); restrict to a recurrent class"
            ),
            Error::NotConverged { iterations, residual } => write!(
                f,
                "stationary solver did not converge after {iterations} iterations (residual {residual:e})"
            ),
            Error::NotReversible(msg) => write!(f, "not reversible: {msg}"),
            Error::TrajectoryTooShort { len } => {
                write!(f, "trajectory of length {len} is too short; need at least 2 states")
            }
        }
    }
}

impl core::error::Error for Error {}
