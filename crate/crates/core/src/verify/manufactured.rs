use std::f64::consts::PI;
use std::sync::Arc;

use crate::assembly::{ProblemCoefficients, ScalarFn, VectorFn};
use crate::mesh::Rect;
use crate::{Point, Result};

/// `g[i][j] = ∂_j u_i`.
pub type TensorFn = Arc<dyn Fn(Point) -> [[f64; 2]; 2] + Send + Sync>;

/// Analytic solution with all first derivatives, and the data it solves.
#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: String,
    pub rect: Rect,
    pub u: VectorFn,
    pub grad_u: TensorFn,
    /// Equals the curl of `u`.
    pub omega: ScalarFn,
    pub grad_omega: VectorFn,
    pub p: ScalarFn,
    pub grad_p: VectorFn,
    pub nu: ScalarFn,
    pub grad_nu: VectorFn,
    pub sigma: ScalarFn,
    pub nu0: f64,
    pub nu1: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    /// `∫_Ω p`.
    pub pressure_mean: f64,
}

impl std::fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedCase")
            .field("name", &self.name)
            .field("nu0", &self.nu0)
            .field("nu1", &self.nu1)
            .field("kappa1", &self.kappa1)
            .field("kappa2", &self.kappa2)
            .field("pressure_mean", &self.pressure_mean)
            .finish_non_exhaustive()
    }
}

/// Parameters of the smooth unit-square case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1Params {
    pub nu0: f64,
    pub nu1: f64,
    /// σ = ν / perm.
    pub perm: f64,
    pub kappa1: f64,
    pub kappa2: f64,
}

impl Default for Example1Params {
    fn default() -> Self {
        Example1Params::with_viscosity(0.1, 1.0)
    }
}

impl Example1Params {
    /// Augmentation set to κ₁ = 2ν₀/3, κ₂ = ν₀/2 and permeability 0.1.
    pub fn with_viscosity(nu0: f64, nu1: f64) -> Self {
        Example1Params { nu0, nu1, perm: 0.1, kappa1: 2.0 * nu0 / 3.0, kappa2: nu0 / 2.0 }
    }
}

/// `u = (cos πx sin πy, −sin πx cos πy)`, `p = sin πx sin πy`,
/// `ν = ν₀ + (ν₁ − ν₀) cos²(πxy)` on the unit square.
pub fn example1_case_2d() -> ManufacturedCase {
    example1_case_2d_with(Example1Params::default())
}

pub fn example1_case_2d_with(prm: Example1Params) -> ManufacturedCase {
    let Example1Params { nu0, nu1, perm, kappa1, kappa2 } = prm;
    let nu = move |x: Point| nu0 + (nu1 - nu0) * (PI * x[0] * x[1]).cos().powi(2);
    ManufacturedCase {
        name: "example1".into(),
        rect: Rect::UNIT,
        u: Arc::new(|x| {
            let (sx, cx, sy, cy) = trig(x);
            [cx * sy, -sx * cy]
        }),
        grad_u: Arc::new(|x| {
            let (sx, cx, sy, cy) = trig(x);
            [[-PI * sx * sy, PI * cx * cy], [-PI * cx * cy, PI * sx * sy]]
        }),
        omega: Arc::new(|x| {
            let (_, cx, _, cy) = trig(x);
            -2.0 * PI * cx * cy
        }),
        grad_omega: Arc::new(|x| {
            let (sx, cx, sy, cy) = trig(x);
            [2.0 * PI * PI * sx * cy, 2.0 * PI * PI * cx * sy]
        }),
        p: Arc::new(|x| {
            let (sx, _, sy, _) = trig(x);
            sx * sy
        }),
        grad_p: Arc::new(|x| {
            let (sx, cx, sy, cy) = trig(x);
            [PI * cx * sy, PI * sx * cy]
        }),
        nu: Arc::new(nu),
        grad_nu: Arc::new(move |x| {
            let a = PI * x[0] * x[1];
            let s = -2.0 * PI * (nu1 - nu0) * a.cos() * a.sin();
            [s * x[1], s * x[0]]
        }),
        sigma: Arc::new(move |x| nu(x) / perm),
        nu0,
        nu1,
        sigma0: nu0 / perm,
        sigma1: nu1 / perm,
        kappa1,
        kappa2,
        pressure_mean: 4.0 / (PI * PI),
    }
}

fn trig(x: Point) -> (f64, f64, f64, f64) {
    let (sx, cx) = (PI * x[0]).sin_cos();
    let (sy, cy) = (PI * x[1]).sin_cos();
    (sx, cx, sy, cy)
}

/// `σu + ν curl ω + (u·∇)u − 2ε(u)∇ν + ∇p` from the analytic derivatives,
/// with `curl ω = (∂_y ω, −∂_x ω)`.
pub fn forcing_from_momentum(case: &ManufacturedCase, x: Point) -> [f64; 2] {
    let u = (case.u)(x);
    let g = (case.grad_u)(x);
    let gw = (case.grad_omega)(x);
    let gp = (case.grad_p)(x);
    let gn = (case.grad_nu)(x);
    let nu = (case.nu)(x);
    let sigma = (case.sigma)(x);
    let shear = 0.5 * (g[0][1] + g[1][0]);
    let strain = [g[0][0] * gn[0] + shear * gn[1], shear * gn[0] + g[1][1] * gn[1]];
    let curl_w = [gw[1], -gw[0]];
    let mut f = [0.0; 2];
    for i in 0..2 {
        let conv = u[0] * g[i][0] + u[1] * g[i][1];
        f[i] = sigma * u[i] + nu * curl_w[i] + conv - 2.0 * strain[i] + gp[i];
    }
    f
}

impl ManufacturedCase {
    /// Problem data with the synthesized forcing and the exact pressure mean.
    pub fn coefficients(&self) -> Result<ProblemCoefficients> {
        let case = self.clone();
        let (nu, grad_nu, sigma) = (self.nu.clone(), self.grad_nu.clone(), self.sigma.clone());
        ProblemCoefficients::builder()
            .viscosity(move |x| nu(x), move |x| grad_nu(x), self.nu0, self.nu1)
            .brinkman(move |x| sigma(x), self.sigma0, self.sigma1)
            .augmentation(self.kappa1, self.kappa2)
            .forcing(move |x| forcing_from_momentum(&case, x))
            .pressure_mean(self.pressure_mean)
            .build()
    }

    /// Dirichlet data: the exact velocity.
    pub fn boundary(&self) -> impl Fn(crate::mesh::BoundaryTag, Point) -> [f64; 2] + '_ {
        move |_, x| (self.u)(x)
    }
}
