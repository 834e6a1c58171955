//! Numerical laboratory for the semiclassical logarithmic Schrodinger equation
//! `i eps u_t + (eps^2/2) u_xx = lambda u ln|u|^2` in one space dimension.
//!
//! The crate is organised by topic:
//!
//! * [`grid`]: periodic grids, spectral calculus, quadrature, densities.
//! * [`scaling`]: the dispersion ODE `tau'' = 2 lambda / tau` and the `s <-> t` time change.
//! * [`lognls`]: Strang splitting solvers, exact Gaussian solutions, energies, rescaling.
//! * [`wigner`]: Wigner and Husimi transforms and their moment identities.
//! * [`fokker_planck`]: the harmonic Fokker-Planck semigroup and Duhamel solutions.
//! * [`metrics`]: 1D Wasserstein distances, relative entropy bounds, negative Sobolev norms.
//! * [`kie`]: explicit Gaussian solutions of the kinetic isothermal Euler system.

pub mod error;
pub mod fokker_planck;
pub mod grid;
pub mod kie;
pub mod lognls;
pub mod metrics;
mod ode;
pub mod scaling;
pub mod wigner;

pub use error::{Error, Result};
pub use grid::{Density, Grid1D};

/// Crate version, recorded in CLI outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/grids.md")]
    mod grids {}
    #[doc = include_str!("../../../book/src/scaling.md")]
    mod scaling {}
    #[doc = include_str!("../../../book/src/lognls.md")]
    mod lognls {}
    #[doc = include_str!("../../../book/src/wigner.md")]
    mod wigner {}
    #[doc = include_str!("../../../book/src/fokker_planck.md")]
    mod fokker_planck {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/kie.md")]
    mod kie {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
