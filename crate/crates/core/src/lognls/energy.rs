use super::field::WaveField;
use super::solver::DEFAULT_VACUUM_FACTOR;
use crate::error::{Error, Result};
use crate::grid::MIN_MASS;
use crate::scaling::TauTrajectory;

/// Mass, angular momentum and energy of `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    /// `M = ||u||_{L2}`.
    pub mass: f64,
    /// `J = eps Im int conj(u) u'`.
    pub angular_momentum: f64,
    /// `E = kinetic + lambda * entropy`.
    pub energy: f64,
    /// `(eps^2/2) ||u'||^2`.
    pub kinetic: f64,
    /// `int |u|^2 ln|u|^2`.
    pub entropy: f64,
}

/// Energies of the rescaled unknown `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifiedEnergyReport {
    /// `eps^2 / (2 tau^2) ||v'||^2`.
    pub kinetic: f64,
    /// `int |v|^2 ln(|v|^2 / gamma^2)`.
    pub entropy: f64,
    /// `kinetic + lambda * entropy`.
    pub energy: f64,
    /// `kinetic + lambda int_{|v|>1} |v|^2 ln|v|^2 + lambda int y^2 |v|^2`.
    pub plus: f64,
    /// `-lambda int_{|v|<=1} |v|^2 ln|v|^2`.
    pub minus: f64,
    /// `int (y^2 + |ln|v|^2|) |v|^2 + eps^2/tau^2 ||v'||^2`.
    pub tilde: f64,
}

fn require_mass(state: &WaveField) -> Result<()> {
    let m = state.mass_sq();
    if m < MIN_MASS {
        Err(Error::DegenerateMass(m))
    } else {
        Ok(())
    }
}

pub fn conserved_quantities(state: &WaveField, lambda: f64) -> Result<EnergyReport> {
    conserved_quantities_with(state, lambda, DEFAULT_VACUUM_FACTOR)
}

/// As [`conserved_quantities`], with `rho ln rho` set to zero where `rho < vacuum_factor * max rho`.
pub fn conserved_quantities_with(state: &WaveField, lambda: f64, vacuum_factor: f64) -> Result<EnergyReport> {
    require_mass(state)?;
    let grid = state.grid();
    let h = grid.spacing();
    let eps = state.epsilon();
    let grad = state.gradient();
    let floor = vacuum_factor * state.max_modulus_sq();
    let mut momentum = 0.0;
    let mut grad_sq = 0.0;
    let mut entropy = 0.0;
    for (u, du) in state.values().iter().zip(&grad) {
        momentum += (u.conj() * du).im;
        grad_sq += du.norm_sqr();
        let rho = u.norm_sqr();
        if rho >= floor && rho > 0.0 {
            entropy += rho * rho.ln();
        }
    }
    let kinetic = 0.5 * eps * eps * h * grad_sq;
    let entropy = h * entropy;
    Ok(EnergyReport {
        mass: state.mass(),
        angular_momentum: eps * h * momentum,
        energy: kinetic + lambda * entropy,
        kinetic,
        entropy,
    })
}

/// Energies of a rescaled state `v` at time `v.time()`.
pub fn modified_energy_report(v: &WaveField, traj: &TauTrajectory, lambda: f64) -> Result<ModifiedEnergyReport> {
    require_mass(v)?;
    let tau = traj.tau(v.time())?;
    let grid = v.grid();
    let h = grid.spacing();
    let eps = v.epsilon();
    let grad_sq = v.gradient_norm_sq();
    let floor = DEFAULT_VACUUM_FACTOR * v.max_modulus_sq();
    let (mut ent, mut above, mut below, mut second, mut abs_log) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (j, u) in v.values().iter().enumerate() {
        let y = grid.x(j);
        let rho = u.norm_sqr();
        second += y * y * rho;
        if rho >= floor && rho > 0.0 {
            let l = rho.ln();
            ent += rho * (l + y * y);
            abs_log += rho * l.abs();
            if rho > 1.0 {
                above += rho * l;
            } else {
                below += rho * l;
            }
        } else {
            ent += rho * y * y;
        }
    }
    let kinetic = 0.5 * eps * eps / (tau * tau) * grad_sq;
    let entropy = h * ent;
    Ok(ModifiedEnergyReport {
        kinetic,
        entropy,
        energy: kinetic + lambda * entropy,
        plus: kinetic + lambda * h * (above + second),
        minus: -lambda * h * below,
        tilde: h * (second + abs_log) + 2.0 * kinetic,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;

    use super::*;
    use crate::grid::{gamma, Grid1D};
    use crate::scaling::solve_tau;

    #[test]
    fn gamma_has_zero_momentum_and_entropy_gap() {
        let grid = Grid1D::new(16.0, 256).unwrap();
        let u = WaveField::from_fn(&grid, 1.0, |x| Complex64::new(gamma(x), 0.0)).unwrap();
        let r = conserved_quantities(&u, 1.0).unwrap();
        assert!(r.angular_momentum.abs() < 1e-14);
        let traj = solve_tau(1.0, 1.0, 1e-3).unwrap();
        let m = modified_energy_report(&u, &traj, 1.0).unwrap();
        assert!(m.entropy.abs() < 1e-12);
        assert!((m.plus - m.minus - m.energy).abs() < 1e-12);
        assert!(m.plus >= 0.0 && m.minus >= 0.0);

        let k = 1.5;
        let w = WaveField::from_fn(&grid, 0.5, |x| gamma(x) * Complex64::from_polar(1.0, k * x)).unwrap();
        let rw = conserved_quantities(&w, 1.0).unwrap();
        assert!((rw.angular_momentum - 0.5 * k * PI.sqrt()).abs() < 1e-12);
    }
}
