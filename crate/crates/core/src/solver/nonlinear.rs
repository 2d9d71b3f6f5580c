use crate::assembly::{nonlinear_residual, Assembler, MixedSpaces, ProblemCoefficients};
use crate::fe::DiscreteField;
use crate::mesh::BoundaryTag;
use crate::{Error, Point, Result};

use super::linear::{solve_linear_with_info, LinearSolveInfo};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Fixed point on the Oseen problem.
    Picard,
    Newton,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    Zero,
    /// Full unknown vector; its Dirichlet entries are overwritten.
    Given(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearSettings {
    pub method: Method,
    /// ℓ∞ residual tolerance, absolute or relative to the initial residual.
    pub tol: f64,
    pub max_iters: usize,
    pub initial_guess: InitialGuess,
}

impl Default for NonlinearSettings {
    fn default() -> Self {
        NonlinearSettings { method: Method::Newton, tol: 1e-8, max_iters: 20, initial_guess: InitialGuess::Zero }
    }
}

impl NonlinearSettings {
    pub fn picard() -> Self {
        NonlinearSettings { method: Method::Picard, max_iters: 50, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Configuration(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Configuration("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// Accumulated linear-solve counters.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LinearSolveStats {
    pub solves: usize,
    pub max_nnz: usize,
    pub refinements: usize,
    pub seconds: f64,
}

impl LinearSolveStats {
    fn record(&mut self, info: &LinearSolveInfo) {
        self.solves += 1;
        self.max_nnz = self.max_nnz.max(info.nnz);
        self.refinements += info.refinements;
        self.seconds += info.seconds;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub method: Method,
    pub iterations: usize,
    /// ℓ∞ nonlinear residual at each iterate, starting with the initial guess.
    pub residual_history: Vec<f64>,
    /// ℓ∞ norm of each velocity update.
    pub increment_history: Vec<f64>,
    pub converged: bool,
    pub linear: LinearSolveStats,
    /// Why the iteration stopped early, when a linear solve failed.
    pub failure: Option<String>,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().unwrap_or(&f64::NAN)
    }
}

/// Discrete solution split into its fields.
#[derive(Debug, Clone)]
pub struct Solution {
    pub velocity: DiscreteField,
    pub vorticity: DiscreteField,
    pub pressure: DiscreteField,
    pub multiplier: f64,
    /// Concatenated unknown vector.
    pub vector: Vec<f64>,
}

impl Solution {
    fn new(spaces: &MixedSpaces, x: Vec<f64>) -> Result<Self> {
        let (velocity, vorticity, pressure, multiplier) = spaces.split(&x)?;
        Ok(Solution { velocity, vorticity, pressure, multiplier, vector: x })
    }
}

/// Boundary data `g(tag, x)` for the velocity.
pub type BoundaryData<'a> = &'a dyn Fn(BoundaryTag, Point) -> [f64; 2];

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn initial_iterate(spaces: &MixedSpaces, settings: &NonlinearSettings, bc: &[(usize, f64)]) -> Result<Vec<f64>> {
    let mut x = match &settings.initial_guess {
        InitialGuess::Zero => vec![0.0; spaces.n_dofs()],
        InitialGuess::Given(v) if v.len() == spaces.n_dofs() => v.clone(),
        InitialGuess::Given(v) => {
            return Err(Error::InvalidArgument(format!(
                "initial guess of length {} for {} unknowns",
                v.len(),
                spaces.n_dofs()
            )))
        }
    };
    for &(d, v) in bc {
        x[d] = v;
    }
    Ok(x)
}

/// Dispatches on `settings.method`.
pub fn solve(
    spaces: &MixedSpaces,
    coeffs: &ProblemCoefficients,
    settings: &NonlinearSettings,
    g: BoundaryData,
) -> Result<(Solution, SolveReport)> {
    match settings.method {
        Method::Newton => solve_newton(spaces, coeffs, settings, g),
        Method::Picard => solve_picard(spaces, coeffs, settings, g),
    }
}

/// Newton's method on the assembled residual, starting from the initial
/// guess with the boundary values inserted.
///
/// At least one step is always taken. Stops when the ℓ∞ residual drops below
/// `tol` or below `tol` times the initial residual. Running out of
/// iterations or a failed linear solve gives `converged = false`.
pub fn solve_newton(
    spaces: &MixedSpaces,
    coeffs: &ProblemCoefficients,
    settings: &NonlinearSettings,
    g: BoundaryData,
) -> Result<(Solution, SolveReport)> {
    settings.validate()?;
    let asm = Assembler::new(spaces, coeffs)?;
    let bc = spaces.velocity.boundary_values(g);
    let homogeneous: Vec<(usize, f64)> = bc.iter().map(|&(d, _)| (d, 0.0)).collect();
    let mut x = initial_iterate(spaces, settings, &bc)?;
    let nu = spaces.velocity.n_dofs();

    let (mut jac, res) = asm.newton(&x)?;
    let r0 = norm_inf(&res);
    let mut report = SolveReport {
        method: Method::Newton,
        iterations: 0,
        residual_history: vec![r0],
        increment_history: Vec::new(),
        converged: false,
        linear: LinearSolveStats::default(),
        failure: None,
    };
    for it in 1..=settings.max_iters {
        let system = jac.apply_constraints(&homogeneous)?;
        let dx = match solve_linear_with_info(&system) {
            Ok((dx, info)) => {
                report.linear.record(&info);
                dx
            }
            Err(e) => {
                report.failure = Some(e.to_string());
                break;
            }
        };
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
        report.iterations = it;
        report.increment_history.push(norm_inf(&dx[..nu]));
        let (next, res) = asm.newton(&x)?;
        jac = next;
        let r = norm_inf(&res);
        report.residual_history.push(r);
        if r <= settings.tol || r <= settings.tol * r0 {
            report.converged = true;
            break;
        }
    }
    Ok((Solution::new(spaces, x)?, report))
}

/// Fixed-point iteration: each step solves the Oseen problem advected by
/// the previous velocity. Same stopping rule as [`solve_newton`].
pub fn solve_picard(
    spaces: &MixedSpaces,
    coeffs: &ProblemCoefficients,
    settings: &NonlinearSettings,
    g: BoundaryData,
) -> Result<(Solution, SolveReport)> {
    settings.validate()?;
    let asm = Assembler::new(spaces, coeffs)?;
    let bc = spaces.velocity.boundary_values(g);
    let mut x = initial_iterate(spaces, settings, &bc)?;
    let nu = spaces.velocity.n_dofs();
    let dirichlet = spaces.velocity.dirichlet_dofs();
    let oseen_at = |x: &[f64]| -> Result<_> {
        let beta = DiscreteField::from_coefficients(spaces.velocity.clone(), x[..nu].to_vec())?;
        asm.oseen(Some(&beta))
    };

    let mut system = oseen_at(&x)?;
    let r0 = norm_inf(&nonlinear_residual(&system, &x, dirichlet));
    let mut report = SolveReport {
        method: Method::Picard,
        iterations: 0,
        residual_history: vec![r0],
        increment_history: Vec::new(),
        converged: false,
        linear: LinearSolveStats::default(),
        failure: None,
    };
    for it in 1..=settings.max_iters {
        let constrained = system.apply_constraints(&bc)?;
        let next = match solve_linear_with_info(&constrained) {
            Ok((next, info)) => {
                report.linear.record(&info);
                next
            }
            Err(e) => {
                report.failure = Some(e.to_string());
                break;
            }
        };
        let step = next[..nu].iter().zip(&x[..nu]).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        report.increment_history.push(step);
        x = next;
        report.iterations = it;
        system = oseen_at(&x)?;
        let r = norm_inf(&nonlinear_residual(&system, &x, dirichlet));
        report.residual_history.push(r);
        if r <= settings.tol || r <= settings.tol * r0 {
            report.converged = true;
            break;
        }
    }
    Ok((Solution::new(spaces, x)?, report))
}
