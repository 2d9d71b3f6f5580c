//! Augmented mixed finite elements for the steady incompressible Navier–Stokes
//! equations written in velocity, vorticity and pressure, with spatially
//! variable viscosity.
//!
//! The crate is organised bottom-up:
//!
//! * [`mesh`]: structured triangulations of rectangles,
//! * [`fe`]: reference elements, quadrature, function spaces and fields,
//! * [`assembly`]: the augmented saddle-point system and its Newton linearisation,
//! * [`solver`]: sparse direct solves, Picard and Newton drivers, small-data diagnostics,
//! * [`verify`]: manufactured solutions, error norms, convergence studies and the cavity demo.

pub mod assembly;
pub mod error;
pub mod fe;
pub mod mesh;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};

/// A point of the physical plane.
pub type Point = [f64; 2];
