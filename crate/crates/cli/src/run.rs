use std::io::Write;

use vvp_core::assembly::ProblemCoefficients;
use vvp_core::mesh::{Mesh, Rect};
use vvp_core::solver::{check_small_data, forcing_norm, DiagnosticsConfig};
use vvp_core::verify::{example1_case_2d_with, run_cavity, run_convergence, CavityConfig, Example1Params, ManufacturedCase};

use crate::config::{Command, RunConfig};
use crate::output::{format_csv, write_csv, write_vtk};
use crate::CliError;

/// Subdivisions of the mesh used to measure `‖∇ν‖` and `‖f‖`.
const DIAGNOSTICS_MESH: usize = 32;

pub fn example_case(cfg: &RunConfig) -> ManufacturedCase {
    example1_case_2d_with(Example1Params {
        nu0: cfg.nu0,
        nu1: cfg.nu1,
        perm: cfg.perm,
        kappa1: cfg.kappa1,
        kappa2: cfg.kappa2,
    })
}

pub fn cavity_config(cfg: &RunConfig) -> CavityConfig {
    CavityConfig {
        nx: cfg.nx,
        ny: cfg.ny,
        nu0: cfg.nu0,
        perm: cfg.perm,
        kappa1: cfg.kappa1,
        kappa2: cfg.kappa2,
        discretisation: cfg.family.discretisation(),
        vorticity: cfg.vorticity.kind(),
        settings: cfg.settings(),
    }
}

/// Advisory report on the small-data hypotheses.
pub fn print_diagnostics(
    coeffs: &ProblemCoefficients,
    diag: &DiagnosticsConfig,
    f_norm: f64,
) -> Result<String, CliError> {
    let r = check_small_data(coeffs, diag, f_norm)?;
    let mut s = String::new();
    s.push_str(&format!("alpha     = {}\n", r.alpha));
    s.push_str(&format!("alpha_bar = {}\n", r.alpha_bar));
    s.push_str(&format!("kappa     = {}\n", r.kappa));
    s.push_str(&format!("|grad nu|_(0,r*) = {} with r = {}\n", diag.grad_nu_lrstar, diag.r));
    s.push_str(&format!("|f|_0     = {}\n", r.f_norm));
    s.push_str(&format!("ellipticity (alpha > 0): {}\n", r.ellipticity));
    s.push_str(&format!("radius admissible (delta = {} < alpha_bar / (C_4^2 sqrt 2)): {}\n", diag.delta, r.radius_admissible));
    s.push_str(&format!("data small (|f|_0 < alpha_bar delta / 2): {}\n", r.data_small));
    s.push_str(&format!(
        "note: C_r = {} and C_4 = {} are estimates of embedding constants; these checks are advisory and never stop a solve\n",
        diag.c_r, diag.c_4
    ));
    Ok(s)
}

fn create_dir(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out).map_err(|source| CliError::Io { path: cfg.out.clone(), source })
}

fn io(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
}

/// Runs the configured command, writing progress to `out` and files under
/// `cfg.out`. Non-convergence is reported after the outputs are written.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    for w in cfg.warnings() {
        io(out, &format!("warning: {w}\n"))?;
    }
    match cfg.command {
        Command::Convergence => {
            let case = example_case(cfg);
            let report =
                run_convergence(cfg.family.discretisation(), cfg.vorticity.kind(), cfg.levels, &case, &cfg.settings())?;
            create_dir(cfg)?;
            let path = cfg.out.join(format!("convergence-{}-{}.csv", cfg.family, cfg.vorticity));
            write_csv(&report, &path)?;
            io(out, &format_csv(&report))?;
            io(out, &format!("wrote {}\n", path.display()))?;
            if let Some(level) = report.partial {
                return Err(CliError::NonConvergence(format!("nonlinear solve did not converge at level {level}")));
            }
        }
        Command::Cavity => {
            let res = run_cavity(&cavity_config(cfg))?;
            create_dir(cfg)?;
            let path = cfg.out.join("cavity.vtk");
            let s = &res.solution;
            write_vtk(
                res.spaces.mesh(),
                &[("velocity", &s.velocity), ("vorticity", &s.vorticity), ("pressure", &s.pressure)],
                &path,
            )?;
            io(
                out,
                &format!(
                    "iterations {}, residual {:.2e}, |div u|_0 = {:.4e}, int p = {:.2e}\nwrote {}\n",
                    res.report.iterations,
                    res.report.final_residual(),
                    res.divergence_norm,
                    res.pressure_integral,
                    path.display()
                ),
            )?;
            if !res.report.converged {
                return Err(CliError::NonConvergence(format!(
                    "cavity did not converge in {} iterations",
                    res.report.iterations
                )));
            }
        }
        Command::Diagnostics => {
            let coeffs = example_case(cfg).coefficients()?;
            let mesh = Mesh::build_structured(DIAGNOSTICS_MESH, DIAGNOSTICS_MESH, Rect::UNIT)?;
            let diag = DiagnosticsConfig::default().measure(&mesh, &coeffs)?;
            let f = forcing_norm(&mesh, &coeffs)?;
            io(out, &print_diagnostics(&coeffs, &diag, f)?)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_viscosity_prints_known_alpha() {
        let c = ProblemCoefficients::builder()
            .viscosity(|_| 1.0, |_| [0.0, 0.0], 1.0, 1.0)
            .brinkman(|_| 1.0, 1.0, 1.0)
            .augmentation(0.5, 1.0)
            .build()
            .unwrap();
        let text = print_diagnostics(&c, &DiagnosticsConfig::default(), 0.0).unwrap();
        assert!(text.contains("alpha     = 0.3125\n"), "{text}");
        assert!(text.contains("ellipticity (alpha > 0): true"));
        assert!(text.contains("advisory"));
    }

    #[test]
    fn example_data_is_reported_not_refused() {
        let cfg = RunConfig { command: Command::Diagnostics, ..RunConfig::default() };
        let mut buf = Vec::new();
        run(&cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let alpha: f64 = text.lines().next().unwrap().split('=').nth(1).unwrap().trim().parse().unwrap();
        assert!(alpha.is_finite());
        assert_eq!(text.matches(": true").count() + text.matches(": false").count(), 3);
    }
}
