use std::f64::consts::PI;

use num_complex::Complex64;

use super::field::{GaussianWkb, WaveField};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::ode::rk4_step;

/// Default RK4 step for the ansatz ODE.
pub const ANSATZ_STEP: f64 = 1e-4;

/// Exact Gaussian solutions `u = exp(-a x^2 + b x + c)` with complex `a, b, c`.
///
/// Substituting into the equation and matching powers of `x` gives
///
/// ```text
/// a' = -i (2 eps a^2 + 2 lambda Re(a) / eps)
/// b' = -i (2 lambda Re(b) / eps + 2 eps a b)
/// c' = -i (2 lambda Re(c) / eps - eps (b^2 - 2 a) / 2)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianAnsatz {
    wkb: GaussianWkb,
    epsilon: f64,
    lambda: f64,
    step: f64,
}

/// Coefficients `(a, b, c)` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsatzState {
    pub t: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

fn pack(a: Complex64, b: Complex64, c: Complex64) -> [f64; 6] {
    [a.re, a.im, b.re, b.im, c.re, c.im]
}

impl GaussianAnsatz {
    pub fn new(wkb: GaussianWkb, epsilon: f64, lambda: f64) -> Result<Self> {
        wkb.validate()?;
        if !(epsilon > 0.0 && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("need eps > 0 and lambda > 0, got {epsilon}, {lambda}")));
        }
        Ok(Self { wkb, epsilon, lambda, step: ANSATZ_STEP })
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn wkb(&self) -> GaussianWkb {
        self.wkb
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn initial_state(&self) -> AnsatzState {
        let eps = self.epsilon;
        AnsatzState {
            t: 0.0,
            a: Complex64::new(0.5 * self.wkb.sigma0, -0.5 * self.wkb.omega0 / eps),
            b: Complex64::new(0.0, self.wkb.p0 / eps),
            c: Complex64::new(0.5 * self.wkb.rho_star.ln(), 0.0),
        }
    }

    fn rhs(&self) -> impl Fn(f64, &[f64; 6]) -> [f64; 6] {
        let eps = self.epsilon;
        let lam = self.lambda;
        move |_t, y| {
            let a = Complex64::new(y[0], y[1]);
            let b = Complex64::new(y[2], y[3]);
            let c = Complex64::new(y[4], y[5]);
            let mi = Complex64::new(0.0, -1.0);
            let da = mi * (2.0 * eps * a * a + 2.0 * lam * a.re / eps);
            let db = mi * (2.0 * lam * b.re / eps + 2.0 * eps * a * b);
            let dc = mi * (2.0 * lam * c.re / eps - 0.5 * eps * (b * b - 2.0 * a));
            pack(da, db, dc)
        }
    }

    fn advance(&self, from: AnsatzState, t: f64) -> Result<AnsatzState> {
        let span = t - from.t;
        if span < 0.0 {
            return Err(Error::OutOfRange(format!("cannot integrate backwards from {} to {t}", from.t)));
        }
        if span == 0.0 {
            return Ok(from);
        }
        let n = (span / self.step).ceil().max(1.0) as usize;
        let h = span / n as f64;
        let f = self.rhs();
        let mut y = pack(from.a, from.b, from.c);
        for k in 0..n {
            y = rk4_step(&f, from.t + k as f64 * h, y, h);
        }
        if y.iter().any(|v| !v.is_finite()) || y[0] <= 0.0 {
            return Err(Error::Refinement(format!("ansatz ODE blew up before t={t}")));
        }
        Ok(AnsatzState {
            t,
            a: Complex64::new(y[0], y[1]),
            b: Complex64::new(y[2], y[3]),
            c: Complex64::new(y[4], y[5]),
        })
    }

    pub fn state_at(&self, t: f64) -> Result<AnsatzState> {
        self.advance(self.initial_state(), t)
    }

    /// States at nondecreasing times, integrated in one sweep.
    pub fn states_at(&self, times: &[f64]) -> Result<Vec<AnsatzState>> {
        let mut out = Vec::with_capacity(times.len());
        let mut cur = self.initial_state();
        for &t in times {
            cur = self.advance(cur, t)?;
            out.push(cur);
        }
        Ok(out)
    }

    pub fn field_at(&self, grid: &Grid1D, t: f64) -> Result<WaveField> {
        self.state_at(t)?.field(grid, self.epsilon)
    }

    /// Discrete L2 norm of `i eps u_t + (eps^2/2) u_xx - lambda u ln|u|^2` at time `t`, with a fourth-order
    /// centred difference of step `dt` in time and spectral differentiation in space.
    pub fn pde_residual(&self, grid: &Grid1D, t: f64, dt: f64) -> Result<f64> {
        if t < 2.0 * dt {
            return Err(Error::OutOfRange("residual stencil reaches negative times".into()));
        }
        let states = self.states_at(&[t - 2.0 * dt, t - dt, t, t + dt, t + 2.0 * dt])?;
        let sample = |s: &AnsatzState| grid.sample_complex(|x| s.value(x));
        let u: Vec<Vec<Complex64>> = states.iter().map(sample).collect();
        let uxx = grid.spectral_derivative(&u[2], 2)?;
        let eps = self.epsilon;
        let mut acc = 0.0;
        for j in 0..grid.len() {
            let ut = (u[0][j] - 8.0 * u[1][j] + 8.0 * u[3][j] - u[4][j]) / (12.0 * dt);
            let v = u[2][j];
            let nl = if v.norm_sqr() > 0.0 { self.lambda * v * v.norm_sqr().ln() } else { Complex64::new(0.0, 0.0) };
            let r = Complex64::new(0.0, eps) * ut + 0.5 * eps * eps * uxx[j] - nl;
            acc += r.norm_sqr();
        }
        Ok((grid.spacing() * acc).sqrt())
    }
}

impl AnsatzState {
    pub fn value(&self, x: f64) -> Complex64 {
        (-self.a * x * x + self.b * x + self.c).exp()
    }

    pub fn field(&self, grid: &Grid1D, epsilon: f64) -> Result<WaveField> {
        WaveField::new(grid, epsilon, grid.sample_complex(|x| self.value(x)), self.t)
    }

    fn alpha(&self) -> f64 {
        2.0 * self.a.re
    }

    /// Mean of the normalised density `|u|^2 / ||u||^2`.
    pub fn mean(&self) -> f64 {
        self.b.re / (2.0 * self.a.re)
    }

    /// Variance of the normalised density.
    pub fn variance(&self) -> f64 {
        1.0 / (2.0 * self.alpha())
    }

    /// Width `c` with `|u|^2` proportional to `exp(-(x - mean)^2 / c^2)`.
    pub fn width(&self) -> f64 {
        (1.0 / self.alpha()).sqrt()
    }

    /// `||u||^2`.
    pub fn mass_sq(&self) -> f64 {
        let alpha = self.alpha();
        let beta = 2.0 * self.b.re;
        (2.0 * self.c.re + beta * beta / (4.0 * alpha)).exp() * (PI / alpha).sqrt()
    }

    /// `int x |u|^2`.
    pub fn first_moment(&self) -> f64 {
        self.mass_sq() * self.mean()
    }

    /// `||u'||^2 = ||u||^2 E|2 a X - b|^2`.
    pub fn gradient_norm_sq(&self) -> f64 {
        let m = self.mean();
        self.mass_sq() * ((2.0 * self.a * m - self.b).norm_sqr() + 4.0 * self.a.norm_sqr() * self.variance())
    }

    /// `int |u|^2 ln|u|^2`.
    pub fn entropy(&self) -> f64 {
        let m = self.mean();
        let second = self.variance() + m * m;
        self.mass_sq() * (-self.alpha() * second + 2.0 * self.b.re * m + 2.0 * self.c.re)
    }

    /// `(eps^2/2) ||u'||^2 + lambda int |u|^2 ln|u|^2`.
    pub fn energy(&self, epsilon: f64, lambda: f64) -> f64 {
        0.5 * epsilon * epsilon * self.gradient_norm_sq() + lambda * self.entropy()
    }

    /// `eps Im int conj(u) u'`.
    pub fn angular_momentum(&self, epsilon: f64) -> f64 {
        let m = self.mean();
        epsilon * self.mass_sq() * (self.b - 2.0 * self.a * m).im
    }
}

/// Exact solution with Gaussian WKB initial data sampled on `grid` at time `t`.
pub fn gaussian_ansatz_oracle(wkb: GaussianWkb, epsilon: f64, lambda: f64, t: f64, grid: &Grid1D) -> Result<WaveField> {
    GaussianAnsatz::new(wkb, epsilon, lambda)?.field_at(grid, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_state_is_wkb_datum() {
        let wkb = GaussianWkb { rho_star: 2.0, sigma0: 1.5, omega0: 0.3, p0: -0.7 };
        let eps = 0.4;
        let s = GaussianAnsatz::new(wkb, eps, 1.0).unwrap().state_at(0.0).unwrap();
        for x in [-2.0, -0.3, 0.0, 1.1] {
            assert!((s.value(x) - wkb.value(x, eps)).norm() < 1e-14);
        }
        assert!((s.mass_sq() - wkb.mass_sq()).abs() < 1e-13);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let wkb = GaussianWkb { rho_star: 1.0, sigma0: 1.0, omega0: 0.5, p0: 1.0 };
        let eps = 0.5;
        let grid = Grid1D::new(16.0, 512).unwrap();
        let s = GaussianAnsatz::new(wkb, eps, 1.0).unwrap().state_at(0.6).unwrap();
        let u = s.field(&grid, eps).unwrap();
        assert!((u.mass_sq() - s.mass_sq()).abs() < 1e-12);
        assert!((u.gradient_norm_sq() - s.gradient_norm_sq()).abs() < 1e-9);
        let dens = u.density();
        assert!((dens.first_moment() - s.first_moment()).abs() < 1e-12);
        assert!((dens.entropy() - s.entropy()).abs() < 1e-10);
    }
}
