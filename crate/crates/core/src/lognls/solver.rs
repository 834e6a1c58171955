use num_complex::Complex64;

use super::field::WaveField;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::scaling::TauTrajectory;

/// `delta_vac = DEFAULT_VACUUM_FACTOR * max|u|^2` floors the logarithm.
pub const DEFAULT_VACUUM_FACTOR: f64 = 1e-30;

fn check_common(epsilon: f64, lambda: f64, dt: f64, vacuum_factor: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {epsilon}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    if !(vacuum_factor > 0.0 && vacuum_factor <= 1.0) {
        return Err(Error::InvalidParameter(format!("vacuum factor must lie in (0, 1], got {vacuum_factor}")));
    }
    Ok(())
}

fn log_phase_rotation(values: &mut [Complex64], coef: f64, vacuum_factor: f64, potential: Option<&[f64]>) {
    let peak = values.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);
    let floor = vacuum_factor * peak;
    for (j, u) in values.iter_mut().enumerate() {
        let mut arg = u.norm_sqr().max(floor).ln();
        if let Some(p) = potential {
            arg += p[j];
        }
        *u *= Complex64::from_polar(1.0, -coef * arg);
    }
}

fn check_finite(values: &[Complex64]) -> Result<()> {
    if values.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("Strang step"))
    }
}

/// Strang splitting for `i eps u_t + (eps^2/2) u_xx = lambda u ln|u|^2`:
/// half kinetic step, exact log-phase rotation, half kinetic step.
#[derive(Debug, Clone)]
pub struct StrangSolver {
    grid: Grid1D,
    epsilon: f64,
    lambda: f64,
    dt: f64,
    vacuum_factor: f64,
    half_kinetic: Vec<Complex64>,
}

impl StrangSolver {
    pub fn new(grid: &Grid1D, epsilon: f64, lambda: f64, dt: f64) -> Result<Self> {
        Self::with_vacuum_factor(grid, epsilon, lambda, dt, DEFAULT_VACUUM_FACTOR)
    }

    pub fn with_vacuum_factor(grid: &Grid1D, epsilon: f64, lambda: f64, dt: f64, vacuum_factor: f64) -> Result<Self> {
        check_common(epsilon, lambda, dt, vacuum_factor)?;
        let half_kinetic =
            grid.wavenumbers().iter().map(|k| Complex64::from_polar(1.0, -epsilon * k * k * dt / 4.0)).collect();
        Ok(Self { grid: grid.clone(), epsilon, lambda, dt, vacuum_factor, half_kinetic })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn kinetic(&self, values: &mut [Complex64]) {
        self.grid.fft(values);
        values.iter_mut().zip(&self.half_kinetic).for_each(|(u, m)| *u *= m);
        self.grid.ifft(values);
    }

    pub fn step(&self, state: &mut WaveField) -> Result<()> {
        if state.grid() != &self.grid || state.epsilon() != self.epsilon {
            return Err(Error::InvalidParameter("state does not match the solver grid or eps".into()));
        }
        let coef = self.lambda * self.dt / self.epsilon;
        let t = state.time();
        let values = state.values_mut();
        self.kinetic(values);
        log_phase_rotation(values, coef, self.vacuum_factor, None);
        self.kinetic(values);
        check_finite(values)?;
        state.set_time(t + self.dt);
        Ok(())
    }

    pub fn advance(&self, state: &mut WaveField, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step(state)?;
        }
        Ok(())
    }
}

/// One Strang step of size `dt` for the state's own grid and `eps`.
pub fn strang_step(state: &WaveField, lambda: f64, dt: f64) -> Result<WaveField> {
    let solver = StrangSolver::new(state.grid(), state.epsilon(), lambda, dt)?;
    let mut next = state.clone();
    solver.step(&mut next)?;
    Ok(next)
}

/// Strang splitting for the rescaled system
/// `i eps v_t + eps^2/(2 tau^2) v_yy = lambda v ln(|v|^2 / gamma^2)`.
///
/// The kinetic multiplier integrates `1/tau^2` exactly over each half step.
#[derive(Debug, Clone)]
pub struct RescaledSolver {
    grid: Grid1D,
    epsilon: f64,
    lambda: f64,
    dt: f64,
    vacuum_factor: f64,
    traj: TauTrajectory,
    k_sq: Vec<f64>,
    y_sq: Vec<f64>,
}

impl RescaledSolver {
    pub fn new(grid: &Grid1D, epsilon: f64, traj: &TauTrajectory, dt: f64) -> Result<Self> {
        Self::with_vacuum_factor(grid, epsilon, traj, dt, DEFAULT_VACUUM_FACTOR)
    }

    pub fn with_vacuum_factor(
        grid: &Grid1D,
        epsilon: f64,
        traj: &TauTrajectory,
        dt: f64,
        vacuum_factor: f64,
    ) -> Result<Self> {
        let lambda = traj.lambda();
        check_common(epsilon, lambda, dt, vacuum_factor)?;
        if traj.sigma() != 1.0 || traj.omega() != 0.0 {
            return Err(Error::InvalidParameter("rescaling needs the universal tau trajectory".into()));
        }
        Ok(Self {
            grid: grid.clone(),
            epsilon,
            lambda,
            dt,
            vacuum_factor,
            traj: traj.clone(),
            k_sq: grid.wavenumbers().iter().map(|k| k * k).collect(),
            y_sq: grid.nodes().iter().map(|y| y * y).collect(),
        })
    }

    pub fn trajectory(&self) -> &TauTrajectory {
        &self.traj
    }

    fn kinetic(&self, values: &mut [Complex64], t0: f64, t1: f64) -> Result<()> {
        let weight = self.traj.integral_inv_tau_sq(t0, t1)?;
        let scale = -0.5 * self.epsilon * weight;
        self.grid.fft(values);
        values.iter_mut().zip(&self.k_sq).for_each(|(u, k2)| *u *= Complex64::from_polar(1.0, scale * k2));
        self.grid.ifft(values);
        Ok(())
    }

    pub fn step(&self, state: &mut WaveField) -> Result<()> {
        if state.grid() != &self.grid || state.epsilon() != self.epsilon {
            return Err(Error::InvalidParameter("state does not match the solver grid or eps".into()));
        }
        let t = state.time();
        let mid = t + 0.5 * self.dt;
        let end = t + self.dt;
        let coef = self.lambda * self.dt / self.epsilon;
        let values = state.values_mut();
        self.kinetic(values, t, mid)?;
        log_phase_rotation(values, coef, self.vacuum_factor, Some(&self.y_sq));
        self.kinetic(values, mid, end)?;
        check_finite(values)?;
        state.set_time(end);
        Ok(())
    }

    /// Steps until `state.time()` reaches `t_end`; the last step is shortened if needed.
    pub fn advance_to(&self, state: &mut WaveField, t_end: f64) -> Result<()> {
        while state.time() < t_end - 1e-12 * t_end.max(1.0) {
            let remaining = t_end - state.time();
            if remaining < self.dt * (1.0 - 1e-9) {
                let short = Self { dt: remaining, ..self.clone() };
                short.step(state)?;
                state.set_time(t_end);
            } else {
                self.step(state)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::gamma;

    #[test]
    fn free_plane_wave_phase() {
        let grid = Grid1D::new(std::f64::consts::PI, 32).unwrap();
        let (eps, dt, k) = (0.7, 0.01, 3.0);
        let solver = StrangSolver::new(&grid, eps, 1e-300, dt).unwrap();
        let mut u = WaveField::from_fn(&grid, eps, |x| Complex64::from_polar(1.0, k * x)).unwrap();
        let before = u.clone();
        solver.step(&mut u).unwrap();
        let expected = Complex64::from_polar(1.0, -eps * k * k * dt / 2.0);
        for (a, b) in u.values().iter().zip(before.values()) {
            assert!((a - b * expected).norm() < 1e-12);
        }
    }

    #[test]
    fn mass_preserved() {
        let grid = Grid1D::new(16.0, 256).unwrap();
        let solver = StrangSolver::new(&grid, 0.5, 1.0, 1e-3).unwrap();
        let mut u = WaveField::from_fn(&grid, 0.5, |x| Complex64::new(gamma(x), 0.0)).unwrap();
        let m0 = u.mass();
        solver.advance(&mut u, 1000).unwrap();
        assert!(((u.mass() - m0) / m0).abs() < 1e-12);
        assert!((u.time() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        let grid = Grid1D::new(16.0, 64).unwrap();
        assert!(StrangSolver::new(&grid, 0.5, 0.0, 1e-3).is_err());
        assert!(StrangSolver::new(&grid, 0.5, 1.0, -1e-3).is_err());
        assert!(StrangSolver::with_vacuum_factor(&grid, 0.5, 1.0, 1e-3, 2.0).is_err());
    }
}
