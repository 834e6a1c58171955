use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure_len, Error, Result};
use crate::grid::{Density, Grid1D};

/// Complex wavefunction on a periodic grid, tagged with `eps` and the current time.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: Grid1D,
    epsilon: f64,
    values: Vec<Complex64>,
    time: f64,
}

impl WaveField {
    pub fn new(grid: &Grid1D, epsilon: f64, values: Vec<Complex64>, time: f64) -> Result<Self> {
        ensure_len(values.len(), grid.len())?;
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {epsilon}")));
        }
        if values.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("WaveField"));
        }
        let field = Self { grid: grid.clone(), epsilon, values, time };
        if field.mass_sq() <= 0.0 {
            return Err(Error::DegenerateMass(0.0));
        }
        Ok(field)
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: &Grid1D, epsilon: f64, f: F) -> Result<Self> {
        Self::new(grid, epsilon, grid.sample_complex(f), 0.0)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub(crate) fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    /// `||u||_{L2}^2`.
    pub fn mass_sq(&self) -> f64 {
        self.grid.spacing() * self.values.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// `M = ||u||_{L2}`.
    pub fn mass(&self) -> f64 {
        self.mass_sq().sqrt()
    }

    pub fn density(&self) -> Density {
        Density::new(&self.grid, self.values.iter().map(|c| c.norm_sqr()).collect())
            .expect("modulus squared is finite and nonnegative")
    }

    pub fn gradient(&self) -> Vec<Complex64> {
        self.grid.spectral_derivative(&self.values, 1).expect("field is finite and sized")
    }

    /// `||u'||_{L2}^2`.
    pub fn gradient_norm_sq(&self) -> f64 {
        self.grid.spacing() * self.gradient().iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// `L2` distance to another field on the same grid.
    pub fn l2_distance(&self, other: &WaveField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("fields live on different grids".into()));
        }
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((self.grid.spacing() * s).sqrt())
    }

    pub fn max_modulus_sq(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max)
    }
}

/// Gaussian WKB datum `sqrt(rho*) exp(-sigma0 x^2 / 2) exp(i (omega0 x^2/2 + p0 x) / eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianWkb {
    pub rho_star: f64,
    pub sigma0: f64,
    pub omega0: f64,
    pub p0: f64,
}

impl GaussianWkb {
    /// The profile `gamma = exp(-x^2/2)`.
    pub const GAMMA: GaussianWkb = GaussianWkb { rho_star: 1.0, sigma0: 1.0, omega0: 0.0, p0: 0.0 };

    pub fn validate(&self) -> Result<()> {
        if !(self.rho_star > 0.0 && self.sigma0 > 0.0 && self.omega0.is_finite() && self.p0.is_finite()) {
            return Err(Error::InvalidParameter(format!("need rho* > 0 and sigma0 > 0, got {self:?}")));
        }
        Ok(())
    }

    pub fn amplitude(&self, x: f64) -> f64 {
        (self.rho_star * (-self.sigma0 * x * x).exp()).sqrt()
    }

    pub fn phase(&self, x: f64) -> f64 {
        0.5 * self.omega0 * x * x + self.p0 * x
    }

    pub fn value(&self, x: f64, epsilon: f64) -> Complex64 {
        Complex64::from_polar(self.amplitude(x), self.phase(x) / epsilon)
    }

    /// `||u_in||^2 = rho* sqrt(pi / sigma0)`.
    pub fn mass_sq(&self) -> f64 {
        self.rho_star * (PI / self.sigma0).sqrt()
    }

    pub fn field(&self, grid: &Grid1D, epsilon: f64) -> Result<WaveField> {
        self.validate()?;
        WaveField::from_fn(grid, epsilon, |x| self.value(x, epsilon))
    }
}
