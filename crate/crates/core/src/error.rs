use core::fmt;

/// Errors raised by the walk, channel and oscillation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An amplitude would leave an open lattice.
    OutOfSupport { position: i64, half_size: i64 },
    /// Momentum is not `2πn/(2N+1)` for the configured lattice.
    InvalidMomentum { k: f64, half_size: i64 },
    /// Massless forward mode: the closed-form eigenvector is 0/0.
    DegenerateEigenvector { theta: f64, k: f64 },
    /// Position amplitudes do not have unit norm.
    UnnormalizedInput { norm_sqr: f64 },
    /// Sector families were built for different step counts.
    StepMismatch { expected: usize, found: usize },
    /// Operand dimensions disagree.
    DimensionMismatch { expected: usize, found: usize },
    /// Mapped walk angles fall outside `(0, π/2)`.
    InfeasibleAngles { theta: f64 },
    /// A state or scenario parameter is invalid.
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OutOfSupport {
                position,
                half_size,
            } => write!(
                f,
                "amplitude at position {position} leaves open lattice -{half_size}..{half_size}"
            ),
            Error::InvalidMomentum { k, half_size } => write!(
                f,
                "momentum {k} is not an allowed value 2πn/(2N+1) for N = {half_size}"
            ),
            Error::DegenerateEigenvector { theta, k } => write!(
                f,
                "mass eigenvector is degenerate at theta = {theta}, k = {k}"
            ),
            Error::UnnormalizedInput { norm_sqr } => {
                write!(
                    f,
                    "position amplitudes have squared norm {norm_sqr}, expected 1"
                )
            }
            Error::StepMismatch { expected, found } => {
                write!(
                    f,
                    "sector families at step {found}, expected step {expected}"
                )
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InfeasibleAngles { theta } => {
                write!(f, "walk angle {theta} lies outside (0, π/2)")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
