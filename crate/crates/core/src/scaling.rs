//! The dispersion ODE `tau'' = 2 lambda sigma / tau` and the time change `s = ln(tau')/2`.

use crate::error::{Error, Result};
use crate::ode::{quintic_hermite, rk4_step};

/// Maximal admissible drift of the first integral along a trajectory.
pub const FIRST_INTEGRAL_TOL: f64 = 1e-8;

const MAX_STORED: usize = 1 << 20;
const TARGET_SPACING: f64 = 0.01;

/// Dense RK4 solution of `tau'' = 2 lambda sigma / tau`, `tau(0) = 1`, `tau'(0) = omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauTrajectory {
    lambda: f64,
    sigma: f64,
    omega: f64,
    dt: f64,
    spacing: f64,
    t_max: f64,
    tau: Vec<f64>,
    tau_dot: Vec<f64>,
    drift: f64,
}

/// Solves the universal dispersion ODE `tau'' = 2 lambda / tau`, `tau(0) = 1`, `tau'(0) = 0`.
pub fn solve_tau(lambda: f64, t_max: f64, dt: f64) -> Result<TauTrajectory> {
    solve_tau0(lambda, 1.0, 0.0, t_max, dt)
}

/// Solves `tau0'' = 2 lambda sigma0 / tau0`, `tau0(0) = 1`, `tau0'(0) = omega0`.
pub fn solve_tau0(lambda: f64, sigma0: f64, omega0: f64, t_max: f64, dt: f64) -> Result<TauTrajectory> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    if !(sigma0 > 0.0 && sigma0.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma0 must be positive, got {sigma0}")));
    }
    if !omega0.is_finite() {
        return Err(Error::NonFinite("omega0"));
    }
    if !(dt > 0.0 && t_max.is_finite() && dt <= t_max) {
        return Err(Error::InvalidParameter(format!("need 0 < dt <= t_max, got dt={dt}, t_max={t_max}")));
    }
    let steps = (t_max / dt - 1e-9).ceil().max(1.0) as usize;
    let dt = t_max / steps as f64;
    let stride = ((TARGET_SPACING / dt).floor() as usize).max(1).max(steps.div_ceil(MAX_STORED));
    let coef = 2.0 * lambda * sigma0;
    let rhs = |_t: f64, y: &[f64; 2]| [y[1], coef / y[0]];
    let invariant = |y: &[f64; 2]| 0.5 * y[1] * y[1] - 0.5 * omega0 * omega0 - coef * y[0].ln();

    let mut tau = vec![1.0];
    let mut tau_dot = vec![omega0];
    let mut y = [1.0, omega0];
    let mut drift = 0.0_f64;
    let mut last_stored = 0;
    for k in 0..steps {
        y = rk4_step(&rhs, k as f64 * dt, y, dt);
        if !(y[0].is_finite() && y[1].is_finite()) || y[0] <= 0.0 {
            return Err(Error::Refinement(format!("trajectory left the domain at t={}", (k + 1) as f64 * dt)));
        }
        drift = drift.max(invariant(&y).abs());
        if (k + 1) % stride == 0 || k + 1 == steps {
            tau.push(y[0]);
            tau_dot.push(y[1]);
            last_stored = k + 1;
        }
    }
    debug_assert_eq!(last_stored, steps);
    if drift > FIRST_INTEGRAL_TOL {
        return Err(Error::Refinement(format!(
            "first integral drift {drift:e} exceeds {FIRST_INTEGRAL_TOL:e}; reduce dt"
        )));
    }
    Ok(TauTrajectory {
        lambda,
        sigma: sigma0,
        omega: omega0,
        dt,
        spacing: dt * stride as f64,
        t_max,
        tau,
        tau_dot,
        drift,
    })
}

impl TauTrajectory {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Integration step actually used.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Largest first-integral residual seen over every integration step.
    pub fn first_integral_drift(&self) -> f64 {
        self.drift
    }

    /// Stored samples `(t_k, tau_k, tau'_k)`.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let n = self.tau.len();
        (0..n).map(move |k| (self.sample_time(k), self.tau[k], self.tau_dot[k]))
    }

    fn sample_time(&self, k: usize) -> f64 {
        if k + 1 == self.tau.len() {
            self.t_max
        } else {
            k as f64 * self.spacing
        }
    }

    fn accel(&self, tau: f64) -> f64 {
        2.0 * self.lambda * self.sigma / tau
    }

    /// `(tau(t), tau'(t))` by quintic Hermite interpolation of the stored samples.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        if !(0.0..=self.t_max * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::OutOfRange(format!("t={t} outside [0, {}]", self.t_max)));
        }
        let last = self.tau.len() - 1;
        let k = ((t / self.spacing).floor() as usize).min(last - 1);
        let (t0, t1) = (self.sample_time(k), self.sample_time(k + 1));
        let (a, b) = (self.tau[k], self.tau[k + 1]);
        let (da, db) = (self.tau_dot[k], self.tau_dot[k + 1]);
        let (aa, ab) = (self.accel(a), self.accel(b));
        let (ja, jb) = (-aa * da / a, -ab * db / b);
        let h = t1 - t0;
        let s = t - t0;
        let (tau, _) = quintic_hermite(h, s, [a, da, aa], [b, db, ab]);
        let (tau_dot, _) = quintic_hermite(h, s, [da, aa, ja], [db, ab, jb]);
        Ok((tau, tau_dot))
    }

    pub fn tau(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)?.0)
    }

    pub fn tau_dot(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)?.1)
    }

    /// `tau'^2/2 - omega^2/2 - 2 lambda sigma ln tau` at time `t` (zero along exact solutions).
    pub fn first_integral(&self, t: f64) -> Result<f64> {
        let (tau, tau_dot) = self.eval(t)?;
        Ok(0.5 * tau_dot * tau_dot - 0.5 * self.omega * self.omega - 2.0 * self.lambda * self.sigma * tau.ln())
    }

    /// `int_{t0}^{t1} dt / tau^2` by composite Simpson on the interpolant.
    pub fn integral_inv_tau_sq(&self, t0: f64, t1: f64) -> Result<f64> {
        let panels = (((t1 - t0).abs() / self.spacing).ceil() as usize).max(1);
        let h = (t1 - t0) / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let a = t0 + p as f64 * h;
            let f = |t: f64| -> Result<f64> { Ok(self.tau(t)?.powi(-2)) };
            acc += h / 6.0 * (f(a)? + 4.0 * f(a + 0.5 * h)? + f(a + h)?);
        }
        Ok(acc)
    }

    /// `s = ln(tau'(t)) / 2`.
    pub fn s_of_t(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Err(Error::OutOfRange("s is -infinity at t = 0".into()));
        }
        let tau_dot = self.tau_dot(t)?;
        if tau_dot <= 0.0 {
            return Err(Error::OutOfRange(format!("tau'({t}) = {tau_dot} is not positive")));
        }
        Ok(0.5 * tau_dot.ln())
    }

    /// Range of `s` reachable with `t` in `[dt, t_max]`.
    pub fn s_range(&self) -> Result<(f64, f64)> {
        Ok((self.s_of_t(self.dt)?, self.s_of_t(self.t_max)?))
    }

    /// Inverse of [`Self::s_of_t`] on `[dt, t_max]`.
    pub fn t_of_s(&self, s: f64) -> Result<f64> {
        let (lo_s, hi_s) = self.s_range()?;
        if !(lo_s..=hi_s).contains(&s) {
            return Err(Error::OutOfRange(format!("s={s} outside [{lo_s}, {hi_s}]")));
        }
        let target = (2.0 * s).exp();
        let idx = self.tau_dot.partition_point(|&v| v < target);
        let mut lo = if idx == 0 { self.dt } else { self.sample_time(idx - 1).max(self.dt) };
        let mut hi = self.sample_time(idx.min(self.tau.len() - 1)).max(lo);
        let mut t = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (tau, tau_dot) = self.eval(t)?;
            let g = tau_dot - target;
            if g.abs() <= 1e-15 * target {
                break;
            }
            if g > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let newton = t - g / self.accel(tau);
            t = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-15 * hi.max(1.0) {
                break;
            }
        }
        Ok(t)
    }

    /// Closed form `tau(s) = exp((e^{4s} - omega^2) / (4 lambda sigma))` implied by the first integral.
    pub fn tau_closed_form_in_s(&self, s: f64) -> f64 {
        (((4.0 * s).exp() - self.omega * self.omega) / (4.0 * self.lambda * self.sigma)).exp()
    }

    /// Relative gap between `tau(t(s))` and the closed form in the `s` variable.
    pub fn tau_in_s_check(&self, s: f64) -> Result<f64> {
        let t = self.t_of_s(s)?;
        let exact = self.tau_closed_form_in_s(s);
        Ok((self.tau(t)? - exact).abs() / exact)
    }
}

/// Leading-order large-time behaviour `(2 t sqrt(lambda ln t), 2 sqrt(lambda ln t))`.
pub fn tau_asymptotic(lambda: f64, t: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    if !(t > std::f64::consts::E) {
        return Err(Error::OutOfRange(format!("asymptotics need t > e, got {t}")));
    }
    let root = (lambda * t.ln()).sqrt();
    Ok((2.0 * t * root, 2.0 * root))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_values_and_first_integral() {
        let traj = solve_tau(1.0, 20.0, 1e-3).unwrap();
        assert_eq!(traj.eval(0.0).unwrap(), (1.0, 0.0));
        for t in [0.0, 0.123, 1.0, 5.5, 19.99, 20.0] {
            assert!(traj.first_integral(t).unwrap().abs() < 1e-8, "t={t}");
        }
        assert!(traj.first_integral_drift() < 1e-8);
    }

    #[test]
    fn asymptotic_guard() {
        assert!(tau_asymptotic(1.0, 2.0).is_err());
        let (_, d) = tau_asymptotic(2.0, 30.0).unwrap();
        assert!((d * d - 8.0 * 30f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn s_variable_roundtrip() {
        let traj = solve_tau(1.0, 10.0, 1e-3).unwrap();
        for s in [-1.0, 0.0, 0.3, 0.6] {
            let t = traj.t_of_s(s).unwrap();
            assert!((traj.s_of_t(t).unwrap() - s).abs() < 1e-9);
        }
        assert!(traj.s_of_t(0.0).is_err());
        assert!((traj.tau_closed_form_in_s(0.0) - 0.25f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(solve_tau(0.0, 1.0, 1e-3).is_err());
        assert!(solve_tau(1.0, 1.0, 2.0).is_err());
        assert!(solve_tau(1.0, 1.0, 0.5).is_err());
    }
}
