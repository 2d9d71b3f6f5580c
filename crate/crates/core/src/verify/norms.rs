use rayon::prelude::*;

use super::manufactured::ManufacturedCase;
use crate::fe::{quadrature, DiscreteField, FieldValue};
use crate::{Error, Result};

/// Errors in the velocity triple norm and the vorticity and pressure L² norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub e_u: f64,
    pub e_w: f64,
    pub e_p: f64,
}

impl ErrorNorms {
    pub fn as_array(&self) -> [f64; 3] {
        [self.e_u, self.e_w, self.e_p]
    }
}

/// Quadrature degree for error integrals: three above the assembly default.
pub fn error_degree(u_h: &DiscreteField) -> usize {
    2 * u_h.space().family().degree() + 2 + 3
}

fn check_same_mesh(fields: &[&DiscreteField]) -> Result<()> {
    let m = fields[0].space().mesh();
    if fields.iter().any(|f| f.space().mesh().n_cells() != m.n_cells()) {
        return Err(Error::Usage("fields live on different meshes".into()));
    }
    Ok(())
}

/// Errors of a discrete solution against the analytic one.
pub fn error_norms(
    u_h: &DiscreteField,
    w_h: &DiscreteField,
    p_h: &DiscreteField,
    case: &ManufacturedCase,
) -> Result<ErrorNorms> {
    check_same_mesh(&[u_h, w_h, p_h])?;
    let rule = quadrature(error_degree(u_h))?;
    let mesh = u_h.space().mesh();
    let parts: Vec<[f64; 3]> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|cell| -> Result<[f64; 3]> {
            let g = mesh.cell_geometry(cell)?;
            let mut acc = [0.0; 3];
            for (xi, w) in rule.iter() {
                let x = g.map(xi);
                let wq = w * g.det.abs();
                let FieldValue::Vector { value, curl, div, .. } = u_h.eval_cell(cell, xi)? else {
                    return Err(Error::Usage("velocity must be vector valued".into()));
                };
                let (u, gu) = ((case.u)(x), (case.grad_u)(x));
                let eu = [u[0] - value[0], u[1] - value[1]];
                let ec = gu[1][0] - gu[0][1] - curl;
                let ed = gu[0][0] + gu[1][1] - div;
                acc[0] += wq * (eu[0] * eu[0] + eu[1] * eu[1] + ec * ec + ed * ed);
                let ew = (case.omega)(x) - w_h.eval_cell(cell, xi)?.scalar()?;
                acc[1] += wq * ew * ew;
                let ep = (case.p)(x) - p_h.eval_cell(cell, xi)?.scalar()?;
                acc[2] += wq * ep * ep;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut sum = [0.0; 3];
    for p in parts {
        for k in 0..3 {
            sum[k] += p[k];
        }
    }
    Ok(ErrorNorms { e_u: sum[0].sqrt(), e_w: sum[1].sqrt(), e_p: sum[2].sqrt() })
}

/// `(∫ p_h, ‖p_h‖₀)` for a scalar field.
pub fn integral_and_norm(p_h: &DiscreteField) -> Result<(f64, f64)> {
    let rule = quadrature(2 * p_h.space().family().degree().max(1))?;
    let mesh = p_h.space().mesh();
    let (mut int, mut sq) = (0.0, 0.0);
    for cell in 0..mesh.n_cells() {
        let g = mesh.cell_geometry(cell)?;
        for (xi, w) in rule.iter() {
            let v = p_h.eval_cell(cell, xi)?.scalar()?;
            int += w * g.det.abs() * v;
            sq += w * g.det.abs() * v * v;
        }
    }
    Ok((int, sq.sqrt()))
}

/// `‖div u_h‖₀`.
pub fn divergence_norm(u_h: &DiscreteField) -> Result<f64> {
    let rule = quadrature(2 * u_h.space().family().degree())?;
    let mesh = u_h.space().mesh();
    let mut sq = 0.0;
    for cell in 0..mesh.n_cells() {
        let g = mesh.cell_geometry(cell)?;
        for (xi, w) in rule.iter() {
            let d = u_h.eval_cell(cell, xi)?.div2d()?;
            sq += w * g.det.abs() * d * d;
        }
    }
    Ok(sq.sqrt())
}

/// Experimental orders `log(e_i/e_{i+1}) / log(h_i/h_{i+1})`.
///
/// A zero error makes the rate undefined; it is reported as NaN.
pub fn eoc(errors: &[f64], hs: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != hs.len() || errors.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need matching error and h lists of length >= 2, got {} and {}",
            errors.len(),
            hs.len()
        )));
    }
    if hs.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("mesh sizes must decrease strictly".into()));
    }
    if errors.iter().any(|&e| e < 0.0 || !e.is_finite()) {
        return Err(Error::InvalidArgument("errors must be finite and non-negative".into()));
    }
    Ok(errors
        .windows(2)
        .zip(hs.windows(2))
        .map(|(e, h)| if e[0] == 0.0 || e[1] == 0.0 { f64::NAN } else { (e[0] / e[1]).ln() / (h[0] / h[1]).ln() })
        .collect())
}
