//! Spherical mean and paraboloid convolution operators on half-space
//! grids, with Fourier, back-projection, and Radon-type inversion routes.
//!
//! The crate revolves around two integral transforms of functions on the
//! upper half-space `R^n x (0, inf)`:
//!
//! * the spherical mean transform over half-spheres centered on the
//!   boundary hyperplane, and
//! * a convolution along paraboloids that the first transform turns into
//!   under an explicit change of variables.
//!
//! The [`intertwine`] module holds that change of variables, [`operators`]
//! the discrete forward and adjoint transforms, [`spectral`] the Fourier
//! multiplier machinery, [`inversion`] the reconstruction routes,
//! [`radon`] the bridge to the classical Radon transform, and [`harness`]
//! the decay and support diagnostics used to validate everything end to
//! end.  The `pmt` binary in the companion crate drives these pieces from
//! the command line.

pub mod error;
pub mod field;
pub mod grid;
pub mod harness;
pub mod intertwine;
pub mod inversion;
pub mod io;
pub mod operators;
pub mod phantom;
pub mod radon;
pub mod spectral;
pub mod sum;

pub use error::{PmtError, PmtResult};
pub use field::Field;
pub use grid::GridSpec;
pub use phantom::{evaluate_phantom, sample_phantom, Bump, Phantom};
