//! Explicit Gaussian solutions of the kinetic isothermal Euler system
//! `f_t + xi f_x - lambda (ln rho)_x f_xi = 0`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Density, Grid1D};
use crate::metrics::wasserstein_1d;
use crate::ode::{quintic_hermite, rk4_step};
use crate::scaling::TauTrajectory;

/// Maximal admissible drift of `c1'^2/2 - 2 lambda ln c1 + C^2/(2 c1^2)`.
pub const FIRST_INTEGRAL_TOL: f64 = 1e-8;

/// Accepted band for the error ratio under halving of the difference step.
pub const ORDER_TWO_BAND: (f64, f64) = (3.5, 4.5);

const MAX_STORED: usize = 1 << 20;
const TARGET_SPACING: f64 = 0.01;

/// Initial data `(lambda, c1(0), c2(0), c1'(0), B0, B1)` of a Gaussian-Gaussian solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianGaussianParams {
    pub lambda: f64,
    pub c10: f64,
    /// Zero for the monokinetic family.
    pub c20: f64,
    pub c11: f64,
    pub b0: f64,
    pub b1: f64,
}

impl GaussianGaussianParams {
    pub fn new(lambda: f64, c10: f64, c20: f64, c11: f64, b0: f64, b1: f64) -> Result<Self> {
        let p = Self { lambda, c10, c20, c11, b0, b1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.c10 > 0.0 && self.c10.is_finite()) {
            return Err(Error::InvalidParameter(format!("c1(0) must be positive, got {}", self.c10)));
        }
        if !(self.c20 >= 0.0 && self.c20.is_finite()) {
            return Err(Error::InvalidParameter(format!("c2(0) must be nonnegative, got {}", self.c20)));
        }
        if ![self.c11, self.b0, self.b1].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("Gaussian-Gaussian parameters"));
        }
        Ok(())
    }

    /// `C = c1(0) c2(0)`.
    pub fn c_tilde(&self) -> f64 {
        self.c10 * self.c20
    }

    pub fn is_monokinetic(&self) -> bool {
        self.c20 == 0.0
    }

    /// `min c1` over `[0, inf)`: `c1(0)` if `c1'(0) >= 0`, else the turning point where
    /// `-2 lambda ln c + C^2/(2 c^2)` equals the first integral.
    pub fn c1_minimum(&self) -> f64 {
        if self.c11 >= 0.0 {
            return self.c10;
        }
        let c_sq = self.c_tilde().powi(2);
        let potential = |c: f64| -2.0 * self.lambda * c.ln() + 0.5 * c_sq / (c * c);
        let level = 0.5 * self.c11 * self.c11 + potential(self.c10);
        let (mut lo, mut hi) = (self.c10, self.c10);
        while potential(lo) < level {
            lo *= 0.5;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if potential(mid) > level {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Dense RK4 solution of `c1'' = 2 lambda / c1 + C^2 / c1^3` with closed-form accessors.
#[derive(Debug, Clone, PartialEq)]
pub struct KieTrajectory {
    params: GaussianGaussianParams,
    dt: f64,
    spacing: f64,
    t_max: f64,
    c1: Vec<f64>,
    c1_dot: Vec<f64>,
    drift: f64,
}

pub fn solve_c1(params: GaussianGaussianParams, t_max: f64, dt: f64) -> Result<KieTrajectory> {
    params.validate()?;
    if !(dt > 0.0 && t_max.is_finite() && dt <= t_max) {
        return Err(Error::InvalidParameter(format!("need 0 < dt <= t_max, got dt={dt}, t_max={t_max}")));
    }
    let steps = (t_max / dt - 1e-9).ceil().max(1.0) as usize;
    let dt = t_max / steps as f64;
    let stride = ((TARGET_SPACING / dt).floor() as usize).max(1).max(steps.div_ceil(MAX_STORED));
    let lambda = params.lambda;
    let c2 = params.c_tilde().powi(2);
    let rhs = |_t: f64, y: &[f64; 2]| [y[1], 2.0 * lambda / y[0] + c2 / y[0].powi(3)];
    let invariant = |y: &[f64; 2]| 0.5 * y[1] * y[1] - 2.0 * lambda * y[0].ln() + 0.5 * c2 / (y[0] * y[0]);
    let mut y = [params.c10, params.c11];
    let start = invariant(&y);
    let mut c1 = vec![y[0]];
    let mut c1_dot = vec![y[1]];
    let mut drift = 0.0_f64;
    for k in 0..steps {
        y = rk4_step(&rhs, k as f64 * dt, y, dt);
        if !(y[0].is_finite() && y[1].is_finite()) || y[0] <= 0.0 {
            return Err(Error::Refinement(format!("c1 left the domain at t={}", (k + 1) as f64 * dt)));
        }
        drift = drift.max((invariant(&y) - start).abs());
        if (k + 1) % stride == 0 || k + 1 == steps {
            c1.push(y[0]);
            c1_dot.push(y[1]);
        }
    }
    if drift > FIRST_INTEGRAL_TOL {
        return Err(Error::Refinement(format!(
            "first integral drift {drift:e} exceeds {FIRST_INTEGRAL_TOL:e}; reduce dt"
        )));
    }
    Ok(KieTrajectory { params, dt, spacing: dt * stride as f64, t_max, c1, c1_dot, drift })
}

/// Largest `|c1 c2 - C| / C` over `[0, t_max]` with `c2` integrated on its own from
/// `c2'' = 2 c2'^2 / c2 - (2 lambda c2^3 + c2^5) / C^2`, `c2'(0) = -c2(0) c1'(0) / c1(0)`.
pub fn c1c2_product_deviation(params: GaussianGaussianParams, t_max: f64, dt: f64) -> Result<f64> {
    params.validate()?;
    if params.is_monokinetic() {
        return Err(Error::InvalidParameter("c2 vanishes identically for monokinetic parameters".into()));
    }
    if !(dt > 0.0 && t_max.is_finite() && dt <= t_max) {
        return Err(Error::InvalidParameter(format!("need 0 < dt <= t_max, got dt={dt}, t_max={t_max}")));
    }
    let steps = (t_max / dt - 1e-9).ceil().max(1.0) as usize;
    let dt = t_max / steps as f64;
    let (lambda, c) = (params.lambda, params.c_tilde());
    let c_sq = c * c;
    let rhs = |_t: f64, y: &[f64; 4]| {
        [
            y[1],
            2.0 * lambda / y[0] + c_sq / y[0].powi(3),
            y[3],
            2.0 * y[3] * y[3] / y[2] - (2.0 * lambda * y[2].powi(3) + y[2].powi(5)) / c_sq,
        ]
    };
    let mut y = [params.c10, params.c11, params.c20, -params.c20 * params.c11 / params.c10];
    let mut worst = 0.0_f64;
    for k in 0..steps {
        y = rk4_step(&rhs, k as f64 * dt, y, dt);
        if !y.iter().all(|v| v.is_finite()) || y[0] <= 0.0 || y[2] <= 0.0 {
            return Err(Error::Refinement(format!("c1 or c2 left the domain at t={}", (k + 1) as f64 * dt)));
        }
        worst = worst.max((y[0] * y[2] - c).abs() / c);
    }
    Ok(worst)
}

impl KieTrajectory {
    pub fn params(&self) -> &GaussianGaussianParams {
        &self.params
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn first_integral_drift(&self) -> f64 {
        self.drift
    }

    /// Stored samples `(t_k, c1_k, c1'_k)`.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.c1.len()).map(move |k| (self.sample_time(k), self.c1[k], self.c1_dot[k]))
    }

    fn sample_time(&self, k: usize) -> f64 {
        if k + 1 == self.c1.len() {
            self.t_max
        } else {
            k as f64 * self.spacing
        }
    }

    fn accel(&self, c: f64) -> f64 {
        2.0 * self.params.lambda / c + self.params.c_tilde().powi(2) / c.powi(3)
    }

    fn jerk(&self, c: f64, cd: f64) -> f64 {
        -2.0 * self.params.lambda * cd / (c * c) - 3.0 * self.params.c_tilde().powi(2) * cd / c.powi(4)
    }

    /// `(c1(t), c1'(t))` by quintic Hermite interpolation.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        if !(0.0..=self.t_max * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::OutOfRange(format!("t={t} outside [0, {}]", self.t_max)));
        }
        let last = self.c1.len() - 1;
        let k = ((t / self.spacing).floor() as usize).min(last - 1);
        let (t0, t1) = (self.sample_time(k), self.sample_time(k + 1));
        let (a, b) = (self.c1[k], self.c1[k + 1]);
        let (da, db) = (self.c1_dot[k], self.c1_dot[k + 1]);
        let (aa, ab) = (self.accel(a), self.accel(b));
        let (ja, jb) = (self.jerk(a, da), self.jerk(b, db));
        let (c, _) = quintic_hermite(t1 - t0, t - t0, [a, da, aa], [b, db, ab]);
        let (cd, _) = quintic_hermite(t1 - t0, t - t0, [da, aa, ja], [db, ab, jb]);
        Ok((c, cd))
    }

    pub fn c1(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)?.0)
    }

    /// `c2 = C / c1`.
    pub fn c2(&self, t: f64) -> Result<f64> {
        Ok(self.params.c_tilde() / self.c1(t)?)
    }

    /// `b1 = B1 t + B0`.
    pub fn b1(&self, t: f64) -> f64 {
        self.params.b1 * t + self.params.b0
    }

    /// `b2(t, x) = (c1'/c1)(x - b1) + B1`.
    pub fn b2(&self, t: f64, x: f64) -> Result<f64> {
        let (c, cd) = self.eval(t)?;
        Ok(cd / c * (x - self.b1(t)) + self.params.b1)
    }

    /// `c1'^2/2 - 2 lambda ln c1 + C^2/(2 c1^2)` at `t`.
    pub fn first_integral(&self, t: f64) -> Result<f64> {
        let (c, cd) = self.eval(t)?;
        Ok(0.5 * cd * cd - 2.0 * self.params.lambda * c.ln() + 0.5 * self.params.c_tilde().powi(2) / (c * c))
    }

    /// `rho(t, x) = exp(-(x - b1)^2 / c1^2) / (sqrt(pi) c1)`.
    pub fn rho(&self, t: f64, x: f64) -> Result<f64> {
        let c = self.c1(t)?;
        let d = x - self.b1(t);
        Ok((-d * d / (c * c)).exp() / (PI.sqrt() * c))
    }

    /// `(ln rho)_x = -2 (x - b1) / c1^2`.
    pub fn log_rho_gradient(&self, t: f64, x: f64) -> Result<f64> {
        let c = self.c1(t)?;
        Ok(-2.0 * (x - self.b1(t)) / (c * c))
    }
}

fn require_kinetic(traj: &KieTrajectory) -> Result<()> {
    if traj.params.is_monokinetic() {
        Err(Error::InvalidParameter("monokinetic parameters (c2(0) = 0) have no phase-space density".into()))
    } else {
        Ok(())
    }
}

/// `f(t, x, xi) = exp(-(x - b1)^2/c1^2 - (xi - b2(t, x))^2/c2^2) / (pi c1 c2)`.
pub fn gg_eval(traj: &KieTrajectory, t: f64, x: f64, xi: f64) -> Result<f64> {
    require_kinetic(traj)?;
    let (c1, c1d) = traj.eval(t)?;
    let c2 = traj.params.c_tilde() / c1;
    let dx = x - traj.b1(t);
    let dxi = xi - (c1d / c1 * dx + traj.params.b1);
    Ok((-dx * dx / (c1 * c1) - dxi * dxi / (c2 * c2)).exp() / (PI * c1 * c2))
}

/// Rectangular `(x, xi)` lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseLattice {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

impl PhaseLattice {
    pub fn new(x: Vec<f64>, xi: Vec<f64>) -> Result<Self> {
        if x.is_empty() || xi.is_empty() {
            return Err(Error::InvalidParameter("empty lattice".into()));
        }
        Ok(Self { x, xi })
    }

    /// `n x n` points covering `b1 +- 3 c1` and the range of `b2 +- 3 c2` over those `x`.
    pub fn around(traj: &KieTrajectory, t: f64, n: usize) -> Result<Self> {
        let c1 = traj.c1(t)?;
        let c2 = traj.c2(t)?;
        let b1 = traj.b1(t);
        let span = |lo: f64, hi: f64| -> Vec<f64> {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64).collect()
        };
        let x = span(b1 - 3.0 * c1, b1 + 3.0 * c1);
        let lo = traj.b2(t, x[0])?.min(traj.b2(t, x[n - 1])?) - 3.0 * c2;
        let hi = traj.b2(t, x[0])?.max(traj.b2(t, x[n - 1])?) + 3.0 * c2;
        Self::new(x, span(lo, hi))
    }
}

/// Default difference step `min(c1, c2) / 64`.
pub fn default_step(traj: &KieTrajectory, t: f64) -> Result<f64> {
    Ok(traj.c1(t)?.min(traj.c2(t)?) / 64.0)
}

fn time_derivative<F: Fn(f64) -> Result<f64>>(f: F, t: f64, h: f64, t_max: f64) -> Result<f64> {
    if t >= h && t + h <= t_max {
        Ok((f(t + h)? - f(t - h)?) / (2.0 * h))
    } else if t < h {
        Ok((-3.0 * f(t)? + 4.0 * f(t + h)? - f(t + 2.0 * h)?) / (2.0 * h))
    } else {
        Ok((3.0 * f(t)? - 4.0 * f(t - h)? + f(t - 2.0 * h)?) / (2.0 * h))
    }
}

/// `f_t + xi f_x - lambda (ln rho)_x f_xi` at one point, derivatives by centered differences of step `h`.
pub fn vlasov_residual_at(traj: &KieTrajectory, t: f64, x: f64, xi: f64, h: f64) -> Result<f64> {
    require_kinetic(traj)?;
    let ft = time_derivative(|s| gg_eval(traj, s, x, xi), t, h, traj.t_max)?;
    let fx = (gg_eval(traj, t, x + h, xi)? - gg_eval(traj, t, x - h, xi)?) / (2.0 * h);
    let fxi = (gg_eval(traj, t, x, xi + h)? - gg_eval(traj, t, x, xi - h)?) / (2.0 * h);
    Ok(ft + xi * fx - traj.params.lambda * traj.log_rho_gradient(t, x)? * fxi)
}

/// Max-norm of the Vlasov residual over `lattice`.
pub fn vlasov_residual(traj: &KieTrajectory, t: f64, lattice: &PhaseLattice, h: f64) -> Result<f64> {
    require_kinetic(traj)?;
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("difference step must be positive, got {h}")));
    }
    let nx = lattice.x.len();
    (0..nx * lattice.xi.len())
        .into_par_iter()
        .map(|idx| vlasov_residual_at(traj, t, lattice.x[idx % nx], lattice.xi[idx / nx], h).map(f64::abs))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Residuals at steps `h`, `h/2`, `h/4` and the two successive ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub steps: [f64; 3],
    pub residuals: [f64; 3],
}

impl Refinement {
    pub fn ratios(&self) -> [f64; 2] {
        [self.residuals[0] / self.residuals[1], self.residuals[1] / self.residuals[2]]
    }

    pub fn is_order_two(&self) -> bool {
        self.ratios().iter().all(|r| (ORDER_TWO_BAND.0..=ORDER_TWO_BAND.1).contains(r))
    }
}

fn refinement<F: Fn(f64) -> Result<f64>>(residual: F, h: f64) -> Result<Refinement> {
    let steps = [h, h / 2.0, h / 4.0];
    let residuals = [residual(steps[0])?, residual(steps[1])?, residual(steps[2])?];
    let r = Refinement { steps, residuals };
    if !r.is_order_two() {
        return Err(Error::Refinement(format!(
            "residual ratios {:?} outside [{}, {}]",
            r.ratios(),
            ORDER_TWO_BAND.0,
            ORDER_TWO_BAND.1
        )));
    }
    Ok(r)
}

/// Three-level refinement of [`vlasov_residual`] starting from step `h`.
pub fn vlasov_refinement(traj: &KieTrajectory, t: f64, lattice: &PhaseLattice, h: f64) -> Result<Refinement> {
    refinement(|s| vlasov_residual(traj, t, lattice, s), h)
}

/// Product `f_a(t, x1, xi1) f_b(t, x2, xi2)` of two solutions with the same `lambda`.
#[derive(Debug, Clone, Copy)]
pub struct TensorProduct<'a> {
    pub first: &'a KieTrajectory,
    pub second: &'a KieTrajectory,
}

impl<'a> TensorProduct<'a> {
    pub fn new(first: &'a KieTrajectory, second: &'a KieTrajectory) -> Result<Self> {
        require_kinetic(first)?;
        require_kinetic(second)?;
        if first.params.lambda != second.params.lambda {
            return Err(Error::InvalidParameter("factors must share lambda".into()));
        }
        Ok(Self { first, second })
    }

    pub fn eval(&self, t: f64, x: [f64; 2], xi: [f64; 2]) -> Result<f64> {
        Ok(gg_eval(self.first, t, x[0], xi[0])? * gg_eval(self.second, t, x[1], xi[1])?)
    }

    /// `f_t + xi . grad_x f - lambda grad_x ln rho . grad_xi f` with centered differences on the product.
    pub fn residual_at(&self, t: f64, x: [f64; 2], xi: [f64; 2], h: f64) -> Result<f64> {
        let t_max = self.first.t_max.min(self.second.t_max);
        let mut r = time_derivative(|s| self.eval(s, x, xi), t, h, t_max)?;
        let grad = [self.first.log_rho_gradient(t, x[0])?, self.second.log_rho_gradient(t, x[1])?];
        for d in 0..2 {
            let (mut xp, mut xm, mut kp, mut km) = (x, x, xi, xi);
            xp[d] += h;
            xm[d] -= h;
            kp[d] += h;
            km[d] -= h;
            let fx = (self.eval(t, xp, xi)? - self.eval(t, xm, xi)?) / (2.0 * h);
            let fxi = (self.eval(t, x, kp)? - self.eval(t, x, km)?) / (2.0 * h);
            r += xi[d] * fx - self.first.params.lambda * grad[d] * fxi;
        }
        Ok(r)
    }

    /// Max-norm over the product of the two factor lattices.
    pub fn residual(&self, t: f64, a: &PhaseLattice, b: &PhaseLattice, h: f64) -> Result<f64> {
        let points: Vec<([f64; 2], [f64; 2])> = a
            .x
            .iter()
            .flat_map(|&x1| {
                b.x.iter().flat_map(move |&x2| {
                    a.xi.iter().flat_map(move |&k1| b.xi.iter().map(move |&k2| ([x1, x2], [k1, k2])))
                })
            })
            .collect();
        points
            .par_iter()
            .map(|(x, xi)| self.residual_at(t, *x, *xi, h).map(f64::abs))
            .try_reduce(|| 0.0, |p, q| Ok(p.max(q)))
    }

    pub fn refinement(&self, t: f64, a: &PhaseLattice, b: &PhaseLattice, h: f64) -> Result<Refinement> {
        refinement(|s| self.residual(t, a, b, s), h)
    }
}

/// Closed-form moments of a Gaussian-Gaussian solution at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KieMoments {
    pub t: f64,
    pub mass: f64,
    /// `iint xi^2 f`.
    pub xi_second: f64,
    /// `int rho ln rho`.
    pub entropy: f64,
    /// `iint x^2 f`.
    pub x_second: f64,
    /// `iint x xi f`.
    pub cross: f64,
}

impl KieMoments {
    pub fn energy(&self, lambda: f64) -> f64 {
        0.5 * self.xi_second + lambda * self.entropy
    }

    fn max_relative_deviation(&self, other: &KieMoments) -> f64 {
        let pairs = [
            (self.mass, other.mass),
            (self.xi_second, other.xi_second),
            (self.entropy, other.entropy),
            (self.x_second, other.x_second),
            (self.cross, other.cross),
        ];
        pairs.iter().map(|(a, b)| (a - b).abs() / a.abs().max(1.0)).fold(0.0, f64::max)
    }
}

pub fn closed_form_moments(traj: &KieTrajectory, t: f64) -> Result<KieMoments> {
    let (c1, c1d) = traj.eval(t)?;
    let c2 = traj.params.c_tilde() / c1;
    let b1 = traj.b1(t);
    let big_b1 = traj.params.b1;
    Ok(KieMoments {
        t,
        mass: 1.0,
        xi_second: 0.5 * c2 * c2 + 0.5 * c1d * c1d + big_b1 * big_b1,
        entropy: -(PI.sqrt() * c1).ln() - 0.5,
        x_second: b1 * b1 + 0.5 * c1 * c1,
        cross: 0.5 * c1 * c1d + big_b1 * b1,
    })
}

/// Moments by trapezoid quadrature of [`gg_eval`]: `x` over `b1 +- 10 c1`, `xi` over `b2(x) +- 10 c2`.
pub fn quadrature_moments(traj: &KieTrajectory, t: f64, nodes: usize) -> Result<KieMoments> {
    require_kinetic(traj)?;
    let c1 = traj.c1(t)?;
    let c2 = traj.c2(t)?;
    let b1 = traj.b1(t);
    let hx = 20.0 * c1 / nodes as f64;
    let hk = 20.0 * c2 / nodes as f64;
    let rows: Vec<[f64; 5]> = (0..=nodes)
        .into_par_iter()
        .map(|i| {
            let x = b1 - 10.0 * c1 + i as f64 * hx;
            let centre = traj.b2(t, x)?;
            let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
            for j in 0..=nodes {
                let xi = centre - 10.0 * c2 + j as f64 * hk;
                let f = gg_eval(traj, t, x, xi)?;
                m0 += f;
                m1 += xi * f;
                m2 += xi * xi * f;
            }
            let rho = hk * m0;
            let ent = if rho > 0.0 { rho * rho.ln() } else { 0.0 };
            Ok([rho, hk * m2, ent, x * x * rho, x * hk * m1])
        })
        .collect::<Result<_>>()?;
    let sum = |k: usize| hx * rows.iter().map(|r| r[k]).sum::<f64>();
    Ok(KieMoments { t, mass: sum(0), xi_second: sum(1), entropy: sum(2), x_second: sum(3), cross: sum(4) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KieConservationReport {
    pub moments: Vec<KieMoments>,
    pub energies: Vec<f64>,
    /// `max |E(t) - E(0)| / |E(0)|` along the closed forms.
    pub energy_drift: f64,
    /// `max |mass - 1|`.
    pub mass_drift: f64,
    /// Largest relative gap between closed-form and quadrature moments.
    pub quadrature_deviation: f64,
    /// `max |d/dt iint x^2 f - 2 iint x xi f|`, relative.
    pub x_second_residual: f64,
    /// `max |d/dt iint x xi f - iint xi^2 f - lambda|`, relative.
    pub cross_residual: f64,
}

/// Mass, energy and moment laws on `samples + 1` equally spaced times of `[t0, t1]`.
pub fn kie_conservation_report(traj: &KieTrajectory, t0: f64, t1: f64, samples: usize) -> Result<KieConservationReport> {
    require_kinetic(traj)?;
    if !(t0 >= 0.0 && t1 > t0 && samples >= 1) {
        return Err(Error::InvalidParameter(format!("invalid time range [{t0}, {t1}]")));
    }
    let lambda = traj.params.lambda;
    let times: Vec<f64> = (0..=samples).map(|k| t0 + (t1 - t0) * k as f64 / samples as f64).collect();
    let moments = times.iter().map(|&t| closed_form_moments(traj, t)).collect::<Result<Vec<_>>>()?;
    let energies: Vec<f64> = moments.iter().map(|m| m.energy(lambda)).collect();
    let e0 = energies[0];
    let energy_drift = energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / e0.abs().max(f64::MIN_POSITIVE);
    let mass_drift = moments.iter().map(|m| (m.mass - 1.0).abs()).fold(0.0, f64::max);
    let quadrature_deviation = times
        .par_iter()
        .zip(&moments)
        .map(|(&t, m)| Ok(m.max_relative_deviation(&quadrature_moments(traj, t, 400)?)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let dh = 2.5e-4;
    let (mut x_res, mut c_res) = (0.0_f64, 0.0_f64);
    for &t in &times {
        let at = |s: f64| closed_form_moments(traj, s);
        let m = at(t)?;
        let dx2 = time_derivative(|s| Ok(at(s)?.x_second), t, dh, traj.t_max)?;
        let dxx = time_derivative(|s| Ok(at(s)?.cross), t, dh, traj.t_max)?;
        x_res = x_res.max((dx2 - 2.0 * m.cross).abs() / m.cross.abs().max(1.0));
        let rhs = m.xi_second + lambda * m.mass;
        c_res = c_res.max((dxx - rhs).abs() / rhs.abs().max(1.0));
    }
    Ok(KieConservationReport {
        moments,
        energies,
        energy_drift,
        mass_drift,
        quadrature_deviation,
        x_second_residual: x_res,
        cross_residual: c_res,
    })
}

/// Rescaled density and its distance to `gamma^2` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledProfile {
    pub t: f64,
    /// `rho~(y) = sqrt(pi) tau rho(t, tau y)`, of mass `sqrt(pi)`.
    pub density: Density,
    /// `||rho~ - gamma^2||_{L1}`.
    pub l1_gap: f64,
    /// `W1(rho~/sqrt(pi), gamma^2/sqrt(pi))`.
    pub w1: f64,
    /// `sqrt(ln ln t / ln t)`, absent for `t <= e`.
    pub envelope: Option<f64>,
    /// `1 / sqrt(ln t)`.
    pub w1_envelope: f64,
    /// `2 pi [-(1 - (tau/c1)^2)/2 + ln(c1/tau) + b1^2/c1^2]`, the exact value of
    /// `2 ||gamma^2|| int gamma^2 ln(gamma^2 / rho~)`.
    pub ck_exact: f64,
    /// The same bracket with `+(1 - (tau/c1)^2)/2`.
    pub ck_plus_half: f64,
}

/// Requires `t >= 2`; `rho` only depends on `c1` and `b1`, so the monokinetic family is allowed.
pub fn gg_rescaled_profile(traj: &KieTrajectory, tau: &TauTrajectory, t: f64, grid: &Grid1D) -> Result<RescaledProfile> {
    if !(t >= 2.0) {
        return Err(Error::InvalidParameter(format!("rescaled profile needs t >= 2, got {t}")));
    }
    let tau_t = tau.tau(t)?;
    let c1 = traj.c1(t)?;
    let b1 = traj.b1(t);
    let ratio = tau_t / c1;
    let density = Density::from_fn(grid, |y| {
        let d = tau_t * y - b1;
        ratio * (-d * d / (c1 * c1)).exp()
    })?;
    let target = Density::from_fn(grid, |y| (-y * y).exp())?;
    let diff: Vec<f64> = density.values().iter().zip(target.values()).map(|(a, b)| a - b).collect();
    let l1_gap = grid.l1_norm(&diff)?;
    let w1 = wasserstein_1d(1.0, &density.normalized()?, &target.normalized()?)?;
    let lt = t.ln();
    let envelope = (lt.ln() > 0.0).then(|| (lt.ln() / lt).sqrt());
    let tail = (c1 / tau_t).ln() + b1 * b1 / (c1 * c1);
    let half = 0.5 * (1.0 - ratio * ratio);
    Ok(RescaledProfile {
        t,
        density,
        l1_gap,
        w1,
        envelope,
        w1_envelope: 1.0 / lt.sqrt(),
        ck_exact: 2.0 * PI * (tail - half),
        ck_plus_half: 2.0 * PI * (tail + half),
    })
}

/// Gaussian-monokinetic isothermal Euler pair
/// `rho = rho* / tau0 exp(-sigma0 (x - p0 t)^2 / tau0^2)`, `v = (tau0'/tau0)(x - p0 t) + p0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonokineticFamily {
    pub rho_star: f64,
    pub p0: f64,
    tau0: TauTrajectory,
}

pub fn monokinetic_family(rho_star: f64, p0: f64, tau0: TauTrajectory) -> Result<MonokineticFamily> {
    if !(rho_star > 0.0 && rho_star.is_finite()) {
        return Err(Error::InvalidParameter(format!("rho* must be positive, got {rho_star}")));
    }
    if !p0.is_finite() {
        return Err(Error::NonFinite("p0"));
    }
    Ok(MonokineticFamily { rho_star, p0, tau0 })
}

impl MonokineticFamily {
    pub fn lambda(&self) -> f64 {
        self.tau0.lambda()
    }

    pub fn sigma0(&self) -> f64 {
        self.tau0.sigma()
    }

    pub fn trajectory(&self) -> &TauTrajectory {
        &self.tau0
    }

    pub fn rho(&self, t: f64, x: f64) -> Result<f64> {
        let tau = self.tau0.tau(t)?;
        let d = x - self.p0 * t;
        Ok(self.rho_star / tau * (-self.sigma0() * d * d / (tau * tau)).exp())
    }

    pub fn velocity(&self, t: f64, x: f64) -> Result<f64> {
        let (tau, tau_dot) = self.tau0.eval(t)?;
        Ok(tau_dot / tau * (x - self.p0 * t) + self.p0)
    }

    /// `rho* sqrt(pi / sigma0)`.
    pub fn mass(&self) -> f64 {
        self.rho_star * (PI / self.sigma0()).sqrt()
    }

    /// `(continuity, momentum)` residuals at one point with centered differences of step `h`.
    pub fn euler_residual_at(&self, t: f64, x: f64, h: f64) -> Result<(f64, f64)> {
        let t_max = self.tau0.t_max();
        let flux = |s: f64, y: f64| -> Result<f64> { Ok(self.rho(s, y)? * self.velocity(s, y)?) };
        let rho_t = time_derivative(|s| self.rho(s, x), t, h, t_max)?;
        let mom_t = time_derivative(|s| flux(s, x), t, h, t_max)?;
        let flux_x = (flux(t, x + h)? - flux(t, x - h)?) / (2.0 * h);
        let mom_flux = |y: f64| -> Result<f64> { Ok(flux(t, y)? * self.velocity(t, y)?) };
        let mom_flux_x = (mom_flux(x + h)? - mom_flux(x - h)?) / (2.0 * h);
        let rho_x = (self.rho(t, x + h)? - self.rho(t, x - h)?) / (2.0 * h);
        Ok((rho_t + flux_x, mom_t + mom_flux_x + self.lambda() * rho_x))
    }

    /// Max-norm of both residuals over `xs`.
    pub fn euler_residual(&self, t: f64, xs: &[f64], h: f64) -> Result<(f64, f64)> {
        xs.par_iter()
            .map(|&x| self.euler_residual_at(t, x, h).map(|(a, b)| (a.abs(), b.abs())))
            .try_reduce(|| (0.0, 0.0), |a, b| Ok((a.0.max(b.0), a.1.max(b.1))))
    }

    /// Three-level refinement of each residual.
    pub fn euler_refinement(&self, t: f64, xs: &[f64], h: f64) -> Result<(Refinement, Refinement)> {
        let continuity = refinement(|s| Ok(self.euler_residual(t, xs, s)?.0), h)?;
        let momentum = refinement(|s| Ok(self.euler_residual(t, xs, s)?.1), h)?;
        Ok((continuity, momentum))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling::solve_tau;

    #[test]
    fn zero_c_tilde_matches_tau() {
        let p = GaussianGaussianParams::new(1.0, 1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let k = solve_c1(p, 5.0, 1e-3).unwrap();
        let tau = solve_tau(1.0, 5.0, 1e-3).unwrap();
        for t in [0.5, 2.0, 5.0] {
            assert!((k.c1(t).unwrap() - tau.tau(t).unwrap()).abs() < 1e-12);
        }
        assert!(gg_eval(&k, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn symmetric_point_has_no_residual() {
        let p = GaussianGaussianParams::new(1.0, 1.0, 0.7, 0.0, 0.0, 0.0).unwrap();
        let k = solve_c1(p, 2.0, 1e-3).unwrap();
        assert!(vlasov_residual_at(&k, 0.0, 0.0, 0.0, 1e-2).unwrap().abs() < 1e-10);
    }
}
