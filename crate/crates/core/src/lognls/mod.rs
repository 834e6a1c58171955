//! The logarithmic Schrodinger equation `i eps u_t + (eps^2/2) u_xx = lambda u ln|u|^2`.
//!
//! [`StrangSolver`] evolves `u` directly; [`RescaledSolver`] evolves the rescaled unknown `v`
//! of `u = tau^{-1/2} (||u|| / ||gamma||) v(t, x/tau) exp(i tau' x^2 / (2 eps tau))`, which stays
//! order one in size and width for all time. [`GaussianAnsatz`] gives exact Gaussian solutions.

mod ansatz;
mod diagnostics;
mod energy;
mod field;
mod rescale;
mod solver;

pub use ansatz::{gaussian_ansatz_oracle, AnsatzState, GaussianAnsatz, ANSATZ_STEP};
pub use diagnostics::{moment_identities, sobolev_growth, MomentDiagnostics, SobolevReport, SobolevRow};
pub use energy::{
    conserved_quantities, conserved_quantities_with, modified_energy_report, EnergyReport, ModifiedEnergyReport,
};
pub use field::{GaussianWkb, WaveField};
pub use rescale::{rescale_to_v, rescale_to_v_on};
pub use solver::{strang_step, RescaledSolver, StrangSolver, DEFAULT_VACUUM_FACTOR};
