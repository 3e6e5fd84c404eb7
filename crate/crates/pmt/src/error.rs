//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by grid, field, operator, and i/o routines.
#[derive(Error, Debug)]
pub enum PmtError {
    /// Grid construction parameters are invalid (dims, spacings, origins).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Two fields that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A grid does not satisfy the lattice compatibility an operator needs.
    #[error("incompatible grid: {0}")]
    IncompatibleGrid(String),

    /// An operator requiring the half-space zero-extension was handed a
    /// field without the half_space flag.
    #[error("missing half_space flag: {0}")]
    MissingHalfSpace(String),

    /// A point outside the sample box of a field that is neither
    /// half-space nor compactly supported.
    #[error("point outside field domain: {0}")]
    OutOfDomain(String),

    /// Phantom construction violated a clearance or positivity rule.
    #[error("invalid phantom: {0}")]
    InvalidPhantom(String),

    /// Field or sinogram dimension does not match what the routine supports.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The ambient dimension is outside the supported range.
    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(usize),

    /// A Fourier multiplier was requested at a frequency where it is
    /// undefined; the caller must regularize.
    #[error("singular frequency: {0}")]
    SingularFrequency(String),

    /// A direction violates the general-position requirement.
    #[error("general-position violation: {0}")]
    GeneralPosition(String),

    /// A translation check was asked for a shift that is not a whole
    /// number of lattice steps.
    #[error("off-lattice shift: {0}")]
    OffLatticeShift(String),

    /// A relative metric against a zero reference.
    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    /// A scan requires clearance from the boundary but the support of the
    /// field reaches it.
    #[error("support touches the boundary: {0}")]
    SupportAtBoundary(String),

    /// A sinogram direction is not a unit vector, or a direction set is
    /// otherwise unusable.
    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    /// Sinogram or offset-grid parameters are unusable.
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// Underlying i/o failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A binary field or sinogram file does not parse.
    #[error("bad file format: {0}")]
    BadFormat(String),
}

/// Convenience alias used throughout the crate.
pub type PmtResult<T> = Result<T, PmtError>;
