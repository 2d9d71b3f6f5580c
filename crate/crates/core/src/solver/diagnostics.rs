use crate::assembly::ProblemCoefficients;
use crate::fe::quadrature;
use crate::mesh::Mesh;
use crate::{Error, Result};

/// Space dimension.
const DIM: f64 = 2.0;

/// Constants entering the small-data hypotheses. `c_r` and `c_4` are
/// embedding constants the user must estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsConfig {
    pub c_r: f64,
    pub c_4: f64,
    /// Exponent `r > 2`.
    pub r: f64,
    /// `‖∇ν‖_{0,r*}`.
    pub grad_nu_lrstar: f64,
    /// Radius of the fixed-point ball.
    pub delta: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig { c_r: 1.0, c_4: 1.0, r: 4.0, grad_nu_lrstar: 0.0, delta: 1.0 }
    }
}

impl DiagnosticsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 2.0) || !self.r.is_finite() {
            return Err(Error::Configuration(format!("r must lie in (2, inf), got {}", self.r)));
        }
        if !(self.delta > 0.0) {
            return Err(Error::Configuration(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.c_r > 0.0 && self.c_4 > 0.0 && self.grad_nu_lrstar >= 0.0) {
            return Err(Error::Configuration("embedding constants must be positive".into()));
        }
        Ok(())
    }

    /// `r* = 2r/(r − 2)`.
    pub fn r_star(&self) -> f64 {
        2.0 * self.r / (self.r - 2.0)
    }

    /// Fills `grad_nu_lrstar` by quadrature over `mesh`.
    pub fn measure(mut self, mesh: &Mesh, coeffs: &ProblemCoefficients) -> Result<Self> {
        self.validate()?;
        self.grad_nu_lrstar = grad_nu_norm(mesh, coeffs, self.r_star())?;
        Ok(self)
    }
}

/// `‖∇ν‖_{0,s}` by the highest-degree quadrature rule.
pub fn grad_nu_norm(mesh: &Mesh, coeffs: &ProblemCoefficients, s: f64) -> Result<f64> {
    let rule = quadrature(crate::fe::quadrature::MAX_DEGREE)?;
    let mut sum = 0.0;
    for cell in 0..mesh.n_cells() {
        let g = mesh.cell_geometry(cell)?;
        for (xi, w) in rule.iter() {
            let d = (coeffs.grad_nu)(g.map(xi));
            sum += w * g.det.abs() * d[0].hypot(d[1]).powf(s);
        }
    }
    Ok(sum.powf(1.0 / s))
}

/// `‖f‖_{0,Ω}` by the highest-degree quadrature rule.
pub fn forcing_norm(mesh: &Mesh, coeffs: &ProblemCoefficients) -> Result<f64> {
    let rule = quadrature(crate::fe::quadrature::MAX_DEGREE)?;
    let mut sum = 0.0;
    for cell in 0..mesh.n_cells() {
        let g = mesh.cell_geometry(cell)?;
        for (xi, w) in rule.iter() {
            let f = (coeffs.f)(g.map(xi));
            sum += w * g.det.abs() * (f[0] * f[0] + f[1] * f[1]);
        }
    }
    Ok(sum.sqrt())
}

/// Outcome of the small-data checks. Advisory only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallDataReport {
    pub alpha: f64,
    pub alpha_bar: f64,
    /// `min{κ₁, κ₂}`.
    pub kappa: f64,
    /// Ellipticity condition: the gradient term stays below the min-term.
    pub ellipticity: bool,
    /// `δ < ᾱ/(C₄²·d^{1/2})`.
    pub radius_admissible: bool,
    /// `‖f‖₀ < ᾱδ/2`.
    pub data_small: bool,
    pub f_norm: f64,
}

/// Evaluates the constants of the fixed-point argument.
pub fn check_small_data(coeffs: &ProblemCoefficients, diag: &DiagnosticsConfig, f_norm: f64) -> Result<SmallDataReport> {
    diag.validate()?;
    let (k1, k2, nu0) = (coeffs.kappa1, coeffs.kappa2, coeffs.nu0);
    let kappa = k1.min(k2);
    let head = coeffs.sigma0.min(k2 / 2.0).min(k1 - 3.0 * k1 * k1 / (4.0 * nu0));
    let g = diag.grad_nu_lrstar;
    let tail = if g == 0.0 {
        0.0
    } else {
        diag.c_r.powi(2) * DIM.powf((diag.r - 2.0) / diag.r) * g * g * (1.0 / kappa + 3.0 / nu0)
    };
    let alpha = head - tail;
    let alpha_bar = (nu0 / 3.0).min(alpha);
    Ok(SmallDataReport {
        alpha,
        alpha_bar,
        kappa,
        ellipticity: alpha > 0.0,
        radius_admissible: diag.delta < alpha_bar / (diag.c_4.powi(2) * DIM.sqrt()),
        data_small: f_norm < 0.5 * alpha_bar * diag.delta,
        f_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;

    fn constant_case() -> ProblemCoefficients {
        ProblemCoefficients::builder()
            .viscosity(|_| 1.0, |_| [0.0, 0.0], 1.0, 1.0)
            .brinkman(|_| 1.0, 1.0, 1.0)
            .augmentation(0.5, 1.0)
            .build()
            .unwrap()
    }

    #[test]
    fn constant_viscosity_constants() {
        let r = check_small_data(&constant_case(), &DiagnosticsConfig::default(), 0.0).unwrap();
        assert_eq!(r.alpha, 5.0 / 16.0);
        assert_eq!(r.alpha_bar, 5.0 / 16.0);
        assert!(r.ellipticity && r.data_small);
    }

    #[test]
    fn alpha_ignores_embedding_constant_without_gradient() {
        let c = constant_case();
        let a = check_small_data(&c, &DiagnosticsConfig::default(), 1.0).unwrap();
        let b = check_small_data(&c, &DiagnosticsConfig { c_r: 37.0, ..Default::default() }, 1.0).unwrap();
        assert_eq!(a.alpha, b.alpha);
    }

    #[test]
    fn kappa1_at_the_limit() {
        let nu0: f64 = 0.3;
        let k1 = 2.0 * nu0 / 3.0;
        assert!((k1 * (1.0 - 3.0 * k1 / (4.0 * nu0)) - nu0 / 3.0).abs() < 1e-15);
        let c = ProblemCoefficients::constant(nu0, 10.0, k1, 10.0).unwrap();
        let r = check_small_data(&c, &DiagnosticsConfig::default(), 0.0).unwrap();
        assert!((r.alpha - nu0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn steep_viscosity_flags_loss_of_ellipticity() {
        let c = ProblemCoefficients::builder()
            .viscosity(|x| 1.0 + 5.0 * x[0], |_| [5.0, 0.0], 1.0, 6.0)
            .augmentation(0.5, 1.0)
            .build()
            .unwrap();
        let mesh = Mesh::build_structured(2, 2, Rect::UNIT).unwrap();
        let diag = DiagnosticsConfig::default().measure(&mesh, &c).unwrap();
        assert!((diag.grad_nu_lrstar - 5.0).abs() < 1e-12);
        let r = check_small_data(&c, &diag, 0.0).unwrap();
        assert!(r.alpha <= 0.0 && !r.ellipticity);
    }

    #[test]
    fn invalid_exponent() {
        let d = DiagnosticsConfig { r: 2.0, ..Default::default() };
        assert!(matches!(check_small_data(&constant_case(), &d, 0.0), Err(Error::Configuration(_))));
    }
}
