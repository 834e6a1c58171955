use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::WaveField;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, TrigInterpolant};
use crate::scaling::TauTrajectory;

/// Relative modulus allowed in the outer sixteenth of the grid before the dilation is refused.
const EDGE_TOL: f64 = 1e-10;

/// `v(t, y) = tau^{1/2} (||gamma|| / ||u||) u(t, tau y) exp(-i tau' tau y^2 / (2 eps))` on the grid of `u`.
pub fn rescale_to_v(state: &WaveField, traj: &TauTrajectory) -> Result<WaveField> {
    rescale_to_v_on(state, traj, state.grid())
}

/// As [`rescale_to_v`], sampling `v` on `y_grid`. `u` is evaluated through its trigonometric interpolant;
/// points with `|tau y| > L` are set to zero.
pub fn rescale_to_v_on(state: &WaveField, traj: &TauTrajectory, y_grid: &Grid1D) -> Result<WaveField> {
    let (tau, tau_dot) = traj.eval(state.time())?;
    let grid = state.grid();
    let n = grid.len();
    let peak = state.max_modulus_sq().sqrt();
    let edge = n / 16;
    let values = state.values();
    let edge_max = values[..edge].iter().chain(&values[n - edge..]).map(|c| c.norm()).fold(0.0, f64::max);
    if edge_max > EDGE_TOL * peak {
        return Err(Error::OutOfRange(format!(
            "field reaches the grid boundary (relative modulus {:.3e}); the dilation would wrap",
            edge_max / peak
        )));
    }
    let interp = TrigInterpolant::new(grid, values)?;
    let scale = tau.sqrt() * PI.powf(0.25) / state.mass();
    let eps = state.epsilon();
    let half_width = grid.half_width();
    let v: Vec<Complex64> = y_grid
        .nodes()
        .par_iter()
        .map(|&y| {
            let x = tau * y;
            if x.abs() > half_width {
                Complex64::new(0.0, 0.0)
            } else {
                scale * interp.eval(x) * Complex64::from_polar(1.0, -tau_dot * tau * y * y / (2.0 * eps))
            }
        })
        .collect();
    WaveField::new(y_grid, eps, v, state.time())
}
