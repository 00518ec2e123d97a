//! 1D slender-body model of blood perfusion around a thin vessel embedded in
//! a porous half-space.
//!
//! The vessel is a tube of radius `eps * a(s)` around a centerline `X(s)` in
//! the upper half space, attached to the tissue boundary `z = 0` at one end
//! and tapering to a free tip at the other. The surrounding capillary bed is
//! a porous medium, so the exterior pressure is harmonic and can be written
//! as a line distribution of half-space Neumann Green's functions along the
//! (slightly shortened) centerline. The source density is `(a^4 p_s)_s`,
//! where the interior pressure `p(s)` solves a degenerate 1D
//! integrodifferential equation: a variable-coefficient Poiseuille term, a
//! Robin exchange term, and a nonlocal term that feeds the exterior pressure
//! back onto the vessel surface.
//!
//! Module map:
//! - [`geometry`]: centerlines, rotation-minimizing frames, radius profiles,
//!   reflection across the wall, surface parameterization, scene validation.
//! - [`kernel`]: the half-space Green's function, the angle-averaged kernel
//!   `K(s, t)`, dense kernel-matrix assembly, and line-potential evaluation.
//! - [`solver1d`]: graded meshes, the degenerate flux operator, the local
//!   (kernel-free) solve, the full dense solve, and weighted norms.
//! - [`field`]: exterior pressure evaluation, slice grids, and the coupling
//!   residuals on the vessel surface.
//! - [`harness`]: scene files, the built-in scene library, run orchestration,
//!   and report/CSV emission.

pub mod field;
pub mod geometry;
pub mod harness;
pub mod kernel;
pub mod quadrature;
pub mod solver1d;

pub use geometry::{Centerline, RadiusProfile, ReflectedCurve, StretchMap, VesselScene};
pub use kernel::{FieldPoint, KernelMatrix};
pub use solver1d::{Mesh1D, Solution};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("scene validation failed: {0}")]
    Validation(String),
    #[error("kernel assembly: {0}")]
    Kernel(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("field evaluation: {0}")]
    Field(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
