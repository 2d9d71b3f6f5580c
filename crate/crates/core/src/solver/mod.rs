//! Sparse direct solves, the Newton and Picard drivers, and advisory
//! small-data diagnostics.

mod diagnostics;
mod linear;
mod nonlinear;

pub use diagnostics::{check_small_data, forcing_norm, grad_nu_norm, DiagnosticsConfig, SmallDataReport};
pub use linear::{solve_csr, solve_linear, solve_linear_with_info, LinearSolveInfo, LINEAR_TOL};
pub use nonlinear::{
    solve, solve_newton, solve_picard, BoundaryData, InitialGuess, LinearSolveStats, Method, NonlinearSettings,
    Solution, SolveReport,
};
