use rayon::prelude::*;

use super::coefficients::ProblemCoefficients;
use super::sparse::{CsrMatrix, Triplet};
use super::system::{AssembledSystem, MixedSpaces};
use crate::fe::{quadrature, DiscreteField, QuadratureRule, ScalarShapes, VectorShapes};
use crate::{Error, Result};

/// Cells handed to one worker at a time.
const CHUNK: usize = 128;

/// Builds the augmented system, its Oseen and Newton variants.
///
/// Cells are processed in chunks, possibly in parallel; triplets are merged
/// in cell order, so the parallel and serial paths agree bit for bit.
pub struct Assembler<'a> {
    spaces: &'a MixedSpaces,
    coeffs: &'a ProblemCoefficients,
    rule: QuadratureRule,
    parallel: bool,
}

#[derive(Default)]
struct Output {
    main: Vec<Triplet>,
    /// Derivative of the convection term with respect to its advecting argument.
    newton: Vec<Triplet>,
    rhs: Vec<(usize, f64)>,
}

#[derive(Default)]
struct Workspace {
    vs: VectorShapes,
    ws: ScalarShapes,
    ps: ScalarShapes,
    uu: Vec<f64>,
    nn: Vec<f64>,
    uw: Vec<f64>,
    wu: Vec<f64>,
    ww: Vec<f64>,
    up: Vec<f64>,
    pu: Vec<f64>,
    fu: Vec<f64>,
    pm: Vec<f64>,
}

fn reset(v: &mut Vec<f64>, n: usize) {
    v.clear();
    v.resize(n, 0.0);
}

impl<'a> Assembler<'a> {
    /// Uses the default quadrature degree of `spaces`.
    pub fn new(spaces: &'a MixedSpaces, coeffs: &'a ProblemCoefficients) -> Result<Self> {
        if coeffs.is_checked() {
            coeffs.validate()?;
        }
        Ok(Assembler { spaces, coeffs, rule: quadrature(spaces.default_degree())?, parallel: true })
    }

    pub fn with_degree(mut self, degree: usize) -> Result<Self> {
        self.rule = quadrature(degree)?;
        Ok(self)
    }

    /// Disables the worker pool.
    pub fn serial(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn degree(&self) -> usize {
        self.rule.degree
    }

    /// System of the Oseen problem with advecting field `beta`; `None` drops convection.
    pub fn oseen(&self, beta: Option<&DiscreteField>) -> Result<AssembledSystem> {
        let beta = match beta {
            Some(b) => {
                if b.coefficients().len() != self.spaces.velocity.n_dofs() || !b.space().is_vector() {
                    return Err(Error::Usage("advecting field is not in the velocity space".into()));
                }
                Some(b.coefficients())
            }
            None => None,
        };
        let out = self.run(beta, false)?;
        Ok(self.finish(&out.main, out.rhs))
    }

    /// Jacobian at `iterate` (full unknown vector) and the nonlinear residual
    /// `F − A(u_h) x`, with Dirichlet rows of the residual zeroed.
    ///
    /// The returned system carries the residual as right-hand side.
    pub fn newton(&self, iterate: &[f64]) -> Result<(AssembledSystem, Vec<f64>)> {
        let b = self.spaces.block_index();
        if iterate.len() != b.size {
            return Err(Error::InvalidArgument(format!("iterate of length {} for {} unknowns", iterate.len(), b.size)));
        }
        let out = self.run(Some(&iterate[b.velocity_range()]), true)?;
        let oseen = self.finish(&out.main, out.rhs);
        let mut residual = oseen.rhs.clone();
        for (r, ax) in residual.iter_mut().zip(oseen.matrix.matvec(iterate)) {
            *r -= ax;
        }
        for &d in self.spaces.velocity.dirichlet_dofs() {
            residual[d] = 0.0;
        }
        let mut triplets = out.main;
        triplets.extend(out.newton);
        let matrix = CsrMatrix::from_triplets(b.size, b.size, &triplets);
        let jac = AssembledSystem { matrix, rhs: residual.clone(), block_index: b, bc_applied: false };
        Ok((jac, residual))
    }

    /// Residual of the nonlinear problem at `iterate`.
    pub fn residual(&self, iterate: &[f64]) -> Result<Vec<f64>> {
        let b = self.spaces.block_index();
        if iterate.len() != b.size {
            return Err(Error::InvalidArgument(format!("iterate of length {} for {} unknowns", iterate.len(), b.size)));
        }
        let beta = DiscreteField::from_coefficients(self.spaces.velocity.clone(), iterate[b.velocity_range()].to_vec())?;
        let sys = self.oseen(Some(&beta))?;
        Ok(nonlinear_residual(&sys, iterate, self.spaces.velocity.dirichlet_dofs()))
    }

    fn finish(&self, triplets: &[Triplet], rhs_entries: Vec<(usize, f64)>) -> AssembledSystem {
        let b = self.spaces.block_index();
        let matrix = CsrMatrix::from_triplets(b.size, b.size, triplets);
        let mut rhs = vec![0.0; b.size];
        for (d, v) in rhs_entries {
            rhs[d] += v;
        }
        rhs[b.multiplier] = self.coeffs.pressure_mean;
        AssembledSystem { matrix, rhs, block_index: b, bc_applied: false }
    }

    fn run(&self, beta: Option<&[f64]>, newton: bool) -> Result<Output> {
        let n_cells = self.spaces.mesh().n_cells();
        let starts: Vec<usize> = (0..n_cells).step_by(CHUNK).collect();
        let work = |&start: &usize| -> Result<Output> {
            let mut out = Output::default();
            let mut ws = Workspace::default();
            for cell in start..(start + CHUNK).min(n_cells) {
                self.cell(cell, beta, newton, &mut ws, &mut out)?;
            }
            Ok(out)
        };
        let parts: Vec<Output> = if self.parallel {
            starts.par_iter().map(work).collect::<Result<_>>()?
        } else {
            starts.iter().map(work).collect::<Result<_>>()?
        };
        let mut total = Output::default();
        for p in parts {
            total.main.extend(p.main);
            total.newton.extend(p.newton);
            total.rhs.extend(p.rhs);
        }
        Ok(total)
    }

    fn cell(&self, cell: usize, beta: Option<&[f64]>, newton: bool, ws: &mut Workspace, out: &mut Output) -> Result<()> {
        let sp = self.spaces;
        let c = self.coeffs;
        let b = sp.block_index();
        let geom = sp.mesh().cell_geometry(cell)?;
        let du = sp.velocity.cell_dofs(cell);
        let dw = sp.vorticity.cell_dofs(cell);
        let dp = sp.pressure.cell_dofs(cell);
        let (nu, nw, np) = (du.len(), dw.len(), dp.len());
        reset(&mut ws.uu, nu * nu);
        reset(&mut ws.nn, if newton { nu * nu } else { 0 });
        reset(&mut ws.uw, nu * nw);
        reset(&mut ws.wu, nw * nu);
        reset(&mut ws.ww, nw * nw);
        reset(&mut ws.up, nu * np);
        reset(&mut ws.pu, np * nu);
        reset(&mut ws.fu, nu);
        reset(&mut ws.pm, np);
        let (k1, k2) = (c.kappa1, c.kappa2);

        for (xi, w) in self.rule.iter() {
            let x = geom.map(xi);
            let wq = w * geom.det.abs();
            sp.velocity.vector_shapes(cell, &geom, xi, &mut ws.vs);
            sp.vorticity.scalar_shapes(&geom, xi, &mut ws.ws);
            sp.pressure.scalar_shapes(&geom, xi, &mut ws.ps);
            let nu_x = (c.nu)(x);
            c.check_viscosity_at(x, nu_x)?;
            let gn = (c.grad_nu)(x);
            let sigma = (c.sigma)(x);
            let f = (c.f)(x);

            // Advecting velocity and its gradient.
            let mut bv = [0.0; 2];
            let mut bg = [[0.0; 2]; 2];
            if let Some(coef) = beta {
                for (k, &d) in du.iter().enumerate() {
                    let a = coef[d];
                    let (v, g) = (ws.vs.values[k], ws.vs.gradients[k]);
                    bv[0] += a * v[0];
                    bv[1] += a * v[1];
                    bg[0][0] += a * g[0][0];
                    bg[0][1] += a * g[0][1];
                    bg[1][0] += a * g[1][0];
                    bg[1][1] += a * g[1][1];
                }
            }

            let vs = &ws.vs;
            for i in 0..nu {
                let vi = vs.values[i];
                let curl_i = vs.curl(i);
                let div_i = vs.div(i);
                ws.fu[i] += wq * (f[0] * vi[0] + f[1] * vi[1]);
                for j in 0..nu {
                    let vj = vs.values[j];
                    let gj = &vs.gradients[j];
                    let shear = 0.5 * (gj[0][1] + gj[1][0]);
                    let strain = [gj[0][0] * gn[0] + shear * gn[1], shear * gn[0] + gj[1][1] * gn[1]];
                    let conv = [bv[0] * gj[0][0] + bv[1] * gj[0][1], bv[0] * gj[1][0] + bv[1] * gj[1][1]];
                    let val = sigma * (vj[0] * vi[0] + vj[1] * vi[1])
                        + k1 * vs.curl(j) * curl_i
                        + k2 * vs.div(j) * div_i
                        - 2.0 * (strain[0] * vi[0] + strain[1] * vi[1])
                        + conv[0] * vi[0]
                        + conv[1] * vi[1];
                    ws.uu[i * nu + j] += wq * val;
                    if newton {
                        let d = [vj[0] * bg[0][0] + vj[1] * bg[0][1], vj[0] * bg[1][0] + vj[1] * bg[1][1]];
                        ws.nn[i * nu + j] += wq * (d[0] * vi[0] + d[1] * vi[1]);
                    }
                }
                let cross = gn[0] * vi[1] - gn[1] * vi[0];
                for m in 0..nw {
                    let eta = ws.ws.values[m];
                    // Shared term of the two off-diagonal blocks, so that they
                    // are exact negatives when the remaining terms vanish.
                    let s = wq * nu_x * eta * curl_i;
                    let t = wq * eta * (cross - k1 * curl_i);
                    ws.uw[i * nw + m] += s + t;
                    ws.wu[m * nu + i] += -s;
                }
                for m in 0..np {
                    let t = wq * ws.ps.values[m] * div_i;
                    ws.up[i * np + m] -= t;
                    ws.pu[m * nu + i] -= t;
                }
            }
            for m in 0..nw {
                let em = wq * nu_x * ws.ws.values[m];
                for n in 0..nw {
                    ws.ww[m * nw + n] += em * ws.ws.values[n];
                }
            }
            for m in 0..np {
                ws.pm[m] += wq * ws.ps.values[m];
            }
        }

        let (ow, op) = (b.vorticity, b.pressure);
        let t = &mut out.main;
        for i in 0..nu {
            for j in 0..nu {
                t.push(Triplet::new(du[i], du[j], ws.uu[i * nu + j]));
            }
            for m in 0..nw {
                t.push(Triplet::new(du[i], ow + dw[m], ws.uw[i * nw + m]));
            }
            for m in 0..np {
                t.push(Triplet::new(du[i], op + dp[m], ws.up[i * np + m]));
            }
        }
        for m in 0..nw {
            for i in 0..nu {
                t.push(Triplet::new(ow + dw[m], du[i], ws.wu[m * nu + i]));
            }
            for n in 0..nw {
                t.push(Triplet::new(ow + dw[m], ow + dw[n], ws.ww[m * nw + n]));
            }
        }
        for m in 0..np {
            for i in 0..nu {
                t.push(Triplet::new(op + dp[m], du[i], ws.pu[m * nu + i]));
            }
            t.push(Triplet::new(op + dp[m], b.multiplier, ws.pm[m]));
            t.push(Triplet::new(b.multiplier, op + dp[m], ws.pm[m]));
        }
        if newton {
            for i in 0..nu {
                for j in 0..nu {
                    out.newton.push(Triplet::new(du[i], du[j], ws.nn[i * nu + j]));
                }
            }
        }
        out.rhs.extend(du.iter().zip(&ws.fu).map(|(&d, &v)| (d, v)));
        Ok(())
    }
}

/// `rhs − A x` with the rows of `dirichlet` zeroed.
pub fn nonlinear_residual(system: &AssembledSystem, x: &[f64], dirichlet: &[usize]) -> Vec<f64> {
    let mut r: Vec<f64> = system.rhs.iter().zip(system.matrix.matvec(x)).map(|(b, ax)| b - ax).collect();
    for &d in dirichlet {
        r[d] = 0.0;
    }
    r
}

/// Oseen system with advecting field `beta` at the default quadrature degree.
pub fn assemble_oseen(
    spaces: &MixedSpaces,
    coeffs: &ProblemCoefficients,
    beta: Option<&DiscreteField>,
) -> Result<AssembledSystem> {
    Assembler::new(spaces, coeffs)?.oseen(beta)
}

/// Jacobian and residual at `iterate` at the default quadrature degree.
pub fn assemble_newton(
    spaces: &MixedSpaces,
    coeffs: &ProblemCoefficients,
    iterate: &[f64],
) -> Result<(AssembledSystem, Vec<f64>)> {
    Assembler::new(spaces, coeffs)?.newton(iterate)
}

/// Gram matrix of `‖v‖² + ‖curl v‖² + ‖div v‖² + ‖θ‖²` over the velocity and
/// vorticity unknowns.
pub fn assemble_gram_x(spaces: &MixedSpaces) -> Result<CsrMatrix> {
    let rule = quadrature(spaces.default_degree())?;
    let mesh = spaces.mesh();
    let b = spaces.block_index();
    let mut vs = VectorShapes::default();
    let mut ss = ScalarShapes::default();
    let mut t = Vec::new();
    for cell in 0..mesh.n_cells() {
        let geom = mesh.cell_geometry(cell)?;
        let du = spaces.velocity.cell_dofs(cell);
        let dw = spaces.vorticity.cell_dofs(cell);
        let mut uu = vec![0.0; du.len() * du.len()];
        let mut ww = vec![0.0; dw.len() * dw.len()];
        for (xi, w) in rule.iter() {
            let wq = w * geom.det.abs();
            spaces.velocity.vector_shapes(cell, &geom, xi, &mut vs);
            spaces.vorticity.scalar_shapes(&geom, xi, &mut ss);
            for i in 0..du.len() {
                for j in 0..du.len() {
                    let (a, c) = (vs.values[i], vs.values[j]);
                    uu[i * du.len() + j] +=
                        wq * (a[0] * c[0] + a[1] * c[1] + vs.curl(i) * vs.curl(j) + vs.div(i) * vs.div(j));
                }
            }
            for m in 0..dw.len() {
                for n in 0..dw.len() {
                    ww[m * dw.len() + n] += wq * ss.values[m] * ss.values[n];
                }
            }
        }
        for i in 0..du.len() {
            for j in 0..du.len() {
                t.push(Triplet::new(du[i], du[j], uu[i * du.len() + j]));
            }
        }
        for m in 0..dw.len() {
            for n in 0..dw.len() {
                t.push(Triplet::new(b.vorticity + dw[m], b.vorticity + dw[n], ww[m * dw.len() + n]));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(b.pressure, b.pressure, &t))
}
