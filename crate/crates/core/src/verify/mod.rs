//! Manufactured solutions, error norms, convergence studies and the
//! lid-driven cavity.

mod manufactured;
mod norms;
mod study;

pub use manufactured::{
    example1_case_2d, example1_case_2d_with, forcing_from_momentum, Example1Params, ManufacturedCase, TensorFn,
};
pub use norms::{divergence_norm, eoc, error_degree, error_norms, integral_and_norm, ErrorNorms};
pub use study::{
    cavity_coefficients, lid, run_cavity, run_convergence, CavityConfig, CavityResult, ConvergenceReport,
    LevelResult, CAVITY_RECT,
};
