use std::sync::Arc;

use super::manufactured::ManufacturedCase;
use super::norms::{divergence_norm, eoc, error_norms, integral_and_norm, ErrorNorms};
use crate::assembly::{Discretisation, MixedSpaces, ProblemCoefficients};
use crate::fe::ElementKind;
use crate::mesh::{BoundaryTag, Mesh, Rect};
use crate::solver::{solve, NonlinearSettings, Solution, SolveReport};
use crate::{Error, Result};

/// One refinement level of a convergence study.
#[derive(Debug, Clone)]
pub struct LevelResult {
    /// Subdivisions per side.
    pub n: usize,
    pub h: f64,
    pub dofs: usize,
    pub errors: ErrorNorms,
    pub report: SolveReport,
    /// `|∫p_h − prescribed mean|`.
    pub mean_defect: f64,
    pub pressure_norm: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub discretisation: Discretisation,
    pub vorticity: ElementKind,
    pub levels: Vec<LevelResult>,
    /// `[r_u, r_ω, r_p]` for each consecutive pair of levels.
    pub rates: Vec<[f64; 3]>,
    /// First level whose nonlinear solve did not converge.
    pub partial: Option<usize>,
}

impl ConvergenceReport {
    pub fn is_partial(&self) -> bool {
        self.partial.is_some()
    }

    pub fn final_rates(&self) -> Option<[f64; 3]> {
        self.rates.last().copied()
    }
}

/// Solves `case` on meshes `n = 2, 4, …, 2^levels` and records errors and rates.
pub fn run_convergence(
    disc: Discretisation,
    vorticity: ElementKind,
    levels: usize,
    case: &ManufacturedCase,
    settings: &NonlinearSettings,
) -> Result<ConvergenceReport> {
    if levels < 2 {
        return Err(Error::InvalidArgument(format!("a convergence study needs at least 2 levels, got {levels}")));
    }
    let coeffs = case.coefficients()?;
    let boundary = case.boundary();
    let mut out = Vec::with_capacity(levels);
    let mut partial = None;
    for level in 0..levels {
        let n = 2usize << level;
        let mesh = Arc::new(Mesh::build_structured(n, n, case.rect)?);
        let spaces = MixedSpaces::build(&mesh, disc, vorticity)?;
        let (sol, report) = solve(&spaces, &coeffs, settings, &boundary)?;
        if !report.converged && partial.is_none() {
            partial = Some(level);
        }
        let errors = error_norms(&sol.velocity, &sol.vorticity, &sol.pressure, case)?;
        let (int, norm) = integral_and_norm(&sol.pressure)?;
        out.push(LevelResult {
            n,
            h: mesh.h,
            dofs: spaces.n_dofs(),
            errors,
            report,
            mean_defect: (int - case.pressure_mean).abs(),
            pressure_norm: norm,
        });
    }
    let hs: Vec<f64> = out.iter().map(|l| l.h).collect();
    let per_field: Vec<Vec<f64>> = (0..3)
        .map(|k| eoc(&out.iter().map(|l| l.errors.as_array()[k]).collect::<Vec<_>>(), &hs))
        .collect::<Result<_>>()?;
    let rates = (0..levels - 1).map(|i| [per_field[0][i], per_field[1][i], per_field[2][i]]).collect();
    Ok(ConvergenceReport { discretisation: disc, vorticity, levels: out, rates, partial })
}

/// Lid-driven cavity on `(0,2)×(0,1)` with `ν = ν₀(1 + xy/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityConfig {
    pub nx: usize,
    pub ny: usize,
    pub nu0: f64,
    /// σ = ν / perm.
    pub perm: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub discretisation: Discretisation,
    pub vorticity: ElementKind,
    pub settings: NonlinearSettings,
}

impl Default for CavityConfig {
    fn default() -> Self {
        CavityConfig::with_viscosity(0.002)
    }
}

impl CavityConfig {
    /// 64×32 cells, MINI velocity and continuous P1 vorticity, permeability
    /// 0.1, κ₁ = 2ν₀/3 and κ₂ = ν₀/2.
    pub fn with_viscosity(nu0: f64) -> Self {
        CavityConfig {
            nx: 64,
            ny: 32,
            nu0,
            perm: 0.1,
            kappa1: 2.0 * nu0 / 3.0,
            kappa2: nu0 / 2.0,
            discretisation: Discretisation::Mini,
            vorticity: ElementKind::P1,
            settings: NonlinearSettings::default(),
        }
    }
}

pub const CAVITY_RECT: Rect = Rect { x0: 0.0, y0: 0.0, x1: 2.0, y1: 1.0 };

/// Zero force, `ν = ν₀(1 + xy/2)` and `σ = ν/perm`.
pub fn cavity_coefficients(nu0: f64, perm: f64, kappa1: f64, kappa2: f64) -> Result<ProblemCoefficients> {
    let nu1 = nu0 * (1.0 + 0.5 * CAVITY_RECT.x1 * CAVITY_RECT.y1);
    ProblemCoefficients::builder()
        .viscosity(move |x| nu0 * (1.0 + 0.5 * x[0] * x[1]), move |x| [0.5 * nu0 * x[1], 0.5 * nu0 * x[0]], nu0, nu1)
        .brinkman(move |x| nu0 * (1.0 + 0.5 * x[0] * x[1]) / perm, nu0 / perm, nu1 / perm)
        .augmentation(kappa1, kappa2)
        .build()
}

/// Unit lid velocity on the top wall, no slip elsewhere.
pub fn lid(tag: BoundaryTag, _: crate::Point) -> [f64; 2] {
    if tag == BoundaryTag::Top {
        [1.0, 0.0]
    } else {
        [0.0, 0.0]
    }
}

#[derive(Debug, Clone)]
pub struct CavityResult {
    pub spaces: MixedSpaces,
    pub solution: Solution,
    pub report: SolveReport,
    pub divergence_norm: f64,
    pub pressure_integral: f64,
    pub pressure_norm: f64,
}

/// Solves the cavity with zero pressure mean.
pub fn run_cavity(config: &CavityConfig) -> Result<CavityResult> {
    if config.nx < 8 || config.ny < 8 {
        return Err(Error::InvalidArgument(format!(
            "cavity needs at least 8x8 cells, got {}x{}",
            config.nx, config.ny
        )));
    }
    let coeffs = cavity_coefficients(config.nu0, config.perm, config.kappa1, config.kappa2)?;
    let mesh = Arc::new(Mesh::build_structured(config.nx, config.ny, CAVITY_RECT)?);
    let spaces = MixedSpaces::build(&mesh, config.discretisation, config.vorticity)?;
    let (solution, report) = solve(&spaces, &coeffs, &config.settings, &lid)?;
    let divergence_norm = divergence_norm(&solution.velocity)?;
    let (pressure_integral, pressure_norm) = integral_and_norm(&solution.pressure)?;
    Ok(CavityResult { spaces, solution, report, divergence_norm, pressure_integral, pressure_norm })
}
