use std::fmt;
use std::sync::Arc;

use crate::{Error, Point, Result};

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;

/// Slack on the pointwise viscosity bounds and the κ₁ upper limit.
pub const BOUND_SLACK: f64 = 1e-12;

/// Data of the augmented problem: viscosity and its gradient, Brinkman
/// coefficient, augmentation parameters, body force and the prescribed
/// pressure mean.
#[derive(Clone)]
pub struct ProblemCoefficients {
    pub nu: ScalarFn,
    /// Supplied analytically alongside `nu`.
    pub grad_nu: VectorFn,
    pub sigma: ScalarFn,
    pub f: VectorFn,
    pub kappa1: f64,
    pub kappa2: f64,
    pub nu0: f64,
    pub nu1: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    /// Right-hand side of the multiplier equation `(p_h, 1) = mean`.
    pub pressure_mean: f64,
    checked: bool,
}

impl fmt::Debug for ProblemCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemCoefficients")
            .field("kappa1", &self.kappa1)
            .field("kappa2", &self.kappa2)
            .field("nu0", &self.nu0)
            .field("nu1", &self.nu1)
            .field("sigma0", &self.sigma0)
            .field("sigma1", &self.sigma1)
            .field("pressure_mean", &self.pressure_mean)
            .field("checked", &self.checked)
            .finish_non_exhaustive()
    }
}

impl ProblemCoefficients {
    pub fn builder() -> CoefficientsBuilder {
        CoefficientsBuilder::default()
    }

    /// Constant viscosity and Brinkman coefficient, zero force.
    pub fn constant(nu: f64, sigma: f64, kappa1: f64, kappa2: f64) -> Result<Self> {
        Self::builder()
            .viscosity(move |_| nu, |_| [0.0, 0.0], nu, nu)
            .brinkman(move |_| sigma, sigma, sigma)
            .augmentation(kappa1, kappa2)
            .build()
    }

    /// Whether bounds are enforced (construction and quadrature-point sampling).
    pub fn is_checked(&self) -> bool {
        self.checked
    }

    /// Checks the bounds needed for coercivity.
    ///
    /// The upper bound on κ₁ is closed: at κ₁ = 2ν₀/3 the term
    /// κ₁ − 3κ₁²/(4ν₀) still equals ν₀/3 > 0.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Configuration(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("nu0", self.nu0)?;
        positive("sigma0", self.sigma0)?;
        positive("kappa1", self.kappa1)?;
        positive("kappa2", self.kappa2)?;
        if self.nu1 < self.nu0 {
            return Err(Error::Configuration(format!("nu1 = {} is below nu0 = {}", self.nu1, self.nu0)));
        }
        if self.sigma1 < self.sigma0 {
            return Err(Error::Configuration(format!(
                "sigma1 = {} is below sigma0 = {}",
                self.sigma1, self.sigma0
            )));
        }
        let limit = kappa1_limit(self.nu0);
        if self.kappa1 > limit * (1.0 + BOUND_SLACK) {
            return Err(Error::Configuration(format!(
                "kappa1 = {} must not exceed (2/3)·nu0 = {limit}",
                self.kappa1
            )));
        }
        Ok(())
    }

    /// Fails when `nu(x)` leaves `[nu0, nu1]` beyond the slack.
    pub(crate) fn check_viscosity_at(&self, x: Point, nu: f64) -> Result<()> {
        if self.checked && (nu < self.nu0 - BOUND_SLACK || nu > self.nu1 + BOUND_SLACK) {
            return Err(Error::Configuration(format!(
                "nu({x:?}) = {nu} outside [{}, {}]",
                self.nu0, self.nu1
            )));
        }
        Ok(())
    }

    /// Same coefficients with a different forcing.
    pub fn with_forcing(mut self, f: impl Fn(Point) -> [f64; 2] + Send + Sync + 'static) -> Self {
        self.f = Arc::new(f);
        self
    }

    pub fn with_pressure_mean(mut self, mean: f64) -> Self {
        self.pressure_mean = mean;
        self
    }
}

/// Upper limit 2ν₀/3 on κ₁.
pub fn kappa1_limit(nu0: f64) -> f64 {
    2.0 * nu0 / 3.0
}

pub struct CoefficientsBuilder {
    nu: ScalarFn,
    grad_nu: VectorFn,
    sigma: ScalarFn,
    f: VectorFn,
    kappa1: f64,
    kappa2: f64,
    nu0: f64,
    nu1: f64,
    sigma0: f64,
    sigma1: f64,
    pressure_mean: f64,
}

impl Default for CoefficientsBuilder {
    fn default() -> Self {
        CoefficientsBuilder {
            nu: Arc::new(|_| 1.0),
            grad_nu: Arc::new(|_| [0.0, 0.0]),
            sigma: Arc::new(|_| 1.0),
            f: Arc::new(|_| [0.0, 0.0]),
            kappa1: 0.5,
            kappa2: 0.5,
            nu0: 1.0,
            nu1: 1.0,
            sigma0: 1.0,
            sigma1: 1.0,
            pressure_mean: 0.0,
        }
    }
}

impl CoefficientsBuilder {
    pub fn viscosity(
        mut self,
        nu: impl Fn(Point) -> f64 + Send + Sync + 'static,
        grad_nu: impl Fn(Point) -> [f64; 2] + Send + Sync + 'static,
        nu0: f64,
        nu1: f64,
    ) -> Self {
        self.nu = Arc::new(nu);
        self.grad_nu = Arc::new(grad_nu);
        self.nu0 = nu0;
        self.nu1 = nu1;
        self
    }

    pub fn brinkman(mut self, sigma: impl Fn(Point) -> f64 + Send + Sync + 'static, sigma0: f64, sigma1: f64) -> Self {
        self.sigma = Arc::new(sigma);
        self.sigma0 = sigma0;
        self.sigma1 = sigma1;
        self
    }

    pub fn augmentation(mut self, kappa1: f64, kappa2: f64) -> Self {
        self.kappa1 = kappa1;
        self.kappa2 = kappa2;
        self
    }

    pub fn forcing(mut self, f: impl Fn(Point) -> [f64; 2] + Send + Sync + 'static) -> Self {
        self.f = Arc::new(f);
        self
    }

    pub fn pressure_mean(mut self, mean: f64) -> Self {
        self.pressure_mean = mean;
        self
    }

    fn finish(self, checked: bool) -> ProblemCoefficients {
        ProblemCoefficients {
            nu: self.nu,
            grad_nu: self.grad_nu,
            sigma: self.sigma,
            f: self.f,
            kappa1: self.kappa1,
            kappa2: self.kappa2,
            nu0: self.nu0,
            nu1: self.nu1,
            sigma0: self.sigma0,
            sigma1: self.sigma1,
            pressure_mean: self.pressure_mean,
            checked,
        }
    }

    pub fn build(self) -> Result<ProblemCoefficients> {
        let c = self.finish(true);
        c.validate()?;
        Ok(c)
    }

    /// Skips every hypothesis check (e.g. κ₁ = κ₂ = 0 or σ ≡ 0 test setups).
    pub fn build_unchecked(self) -> ProblemCoefficients {
        self.finish(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa1_bound() {
        assert!(ProblemCoefficients::constant(0.1, 1.0, 0.08, 0.05).is_err());
        assert!(ProblemCoefficients::constant(0.1, 1.0, kappa1_limit(0.1), 0.05).is_ok());
        assert!(ProblemCoefficients::constant(0.1, 1.0, 0.0, 0.05).is_err());
        assert!(ProblemCoefficients::constant(0.1, 1.0, 0.01, -1.0).is_err());
    }

    #[test]
    fn unchecked_accepts_anything() {
        let c = ProblemCoefficients::builder().augmentation(0.0, 0.0).build_unchecked();
        assert!(!c.is_checked());
        assert!(c.validate().is_err());
    }
}
