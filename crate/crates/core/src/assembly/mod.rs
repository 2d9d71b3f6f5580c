//! The augmented saddle-point system: variable-viscosity and augmentation
//! terms, convection and its linearisation, the divergence constraint, the
//! zero-mean pressure multiplier and Dirichlet conditions.
//!
//! Unknowns are ordered `[velocity | vorticity | pressure | multiplier]`.

mod coefficients;
mod kernel;
mod sparse;
mod system;

pub use coefficients::{kappa1_limit, CoefficientsBuilder, ProblemCoefficients, ScalarFn, VectorFn, BOUND_SLACK};
pub use kernel::{assemble_gram_x, assemble_newton, assemble_oseen, nonlinear_residual, Assembler};
pub use sparse::{CsrMatrix, Triplet};
pub use system::{AssembledSystem, BlockIndex, Discretisation, MixedSpaces};

#[cfg(test)]
mod tests;
