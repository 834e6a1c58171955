//! Wigner and Husimi transforms on the phase-space lattice, their moment identities and the
//! weak comparison with monokinetic measures.
//!
//! The transform samples `rho~(x, z) = f(x + eps z/2) conj(f(x - eps z/2))` on the z-lattice of
//! spacing `h/eps`, so that every half-shift `eps z/2` is a multiple of `h/2`. Odd multiples use a
//! single spectral half-cell shift of `f`; the rest are index shifts. The conjugate lattice in `xi`
//! has spacing `eps pi / L` and covers `[-eps pi/h, eps pi/h)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure_len, Error, Result};
use crate::grid::{Density, Grid1D, TrigInterpolant};
use crate::lognls::WaveField;
use crate::scaling::TauTrajectory;

/// Largest grid accepted by the phase-space transforms (`N^2` doubles).
pub const MAX_PHASE_SPACE_N: usize = 1024;

/// Spectral amplitude allowed in the top sixteenth of the band before the half-cell shift is refused.
pub const SHIFT_ALIAS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Wigner,
    Husimi,
}

/// Real function on the `(x_j, xi_k)` lattice, stored row-major in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceField {
    grid: Grid1D,
    epsilon: f64,
    xi: Vec<f64>,
    values: Vec<f64>,
    flavor: Flavor,
    imag_residue: f64,
}

impl PhaseSpaceField {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Ascending frequency nodes.
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn xi_spacing(&self) -> f64 {
        self.epsilon * PI / self.grid.half_width()
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.xi.len() + k]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let m = self.xi.len();
        &self.values[j * m..(j + 1) * m]
    }

    /// `max |Im| / max |Re|` of the z-transform before the real part was taken.
    pub fn imag_residue(&self) -> f64 {
        self.imag_residue
    }

    /// `int W(x_j, xi) d xi` at every node.
    pub fn xi_moment(&self, power: i32) -> Vec<f64> {
        let d = self.xi_spacing();
        (0..self.grid.len())
            .map(|j| d * self.row(j).iter().zip(&self.xi).map(|(w, xi)| w * xi.powi(power)).sum::<f64>())
            .collect()
    }

    /// `iint phi(x, xi) W dx dxi`.
    pub fn integrate<F: Fn(f64, f64) -> f64 + Sync>(&self, phi: F) -> f64 {
        let cell = self.grid.spacing() * self.xi_spacing();
        let rows: Vec<f64> = (0..self.grid.len())
            .into_par_iter()
            .map(|j| {
                let x = self.grid.x(j);
                self.row(j).iter().zip(&self.xi).map(|(w, &xi)| w * phi(x, xi)).sum::<f64>()
            })
            .collect();
        cell * rows.iter().sum::<f64>()
    }

    pub fn total(&self) -> f64 {
        self.integrate(|_, _| 1.0)
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

fn signed(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

fn wrap(i: i64, n: usize) -> usize {
    i.rem_euclid(n as i64) as usize
}

/// Ascending `xi` nodes for an FFT of length `n` on the z-lattice of spacing `h/eps`.
fn xi_nodes(grid: &Grid1D, epsilon: f64) -> Vec<f64> {
    let n = grid.len() as i64;
    let d = epsilon * PI / grid.half_width();
    (-n / 2..n / 2).map(|k| k as f64 * d).collect()
}

fn check_band(grid: &Grid1D, values: &[Complex64]) -> Result<()> {
    let mut spec = values.to_vec();
    grid.fft(&mut spec);
    let n = grid.len();
    let peak = spec.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let band = n / 32;
    let top = (n / 2 - band..n / 2 + band).map(|m| spec[m].norm()).fold(0.0, f64::max);
    if top > SHIFT_ALIAS_TOL * peak {
        return Err(Error::OutOfRange(format!(
            "field is not band limited (relative amplitude {:.3e} near Nyquist); half shifts would alias",
            top / peak
        )));
    }
    Ok(())
}

fn check_size(grid: &Grid1D) -> Result<()> {
    if grid.len() > MAX_PHASE_SPACE_N {
        return Err(Error::InvalidGrid(format!("phase-space transforms need N <= {MAX_PHASE_SPACE_N}")));
    }
    Ok(())
}

/// `W(x, xi) = (2 pi)^{-1} int e^{-i xi z} f(x + eps z/2) conj(f(x - eps z/2)) dz`.
pub fn wigner_transform(state: &WaveField) -> Result<PhaseSpaceField> {
    let grid = state.grid();
    check_size(grid)?;
    let f = state.values();
    check_band(grid, f)?;
    let n = grid.len();
    let eps = state.epsilon();
    let half = grid.spectral_shift(f, 0.5 * grid.spacing())?;
    let weight = grid.spacing() / eps / (2.0 * PI);
    let rows: Vec<(Vec<f64>, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|j| {
            let jj = j as i64;
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            for (m, slot) in buf.iter_mut().enumerate() {
                let s = signed(m, n);
                let (a, b) = if s % 2 == 0 {
                    let q = s / 2;
                    (f[wrap(jj + q, n)], f[wrap(jj - q, n)])
                } else {
                    let q = (s - 1).div_euclid(2);
                    (half[wrap(jj + q, n)], half[wrap(jj - q - 1, n)])
                };
                *slot = a * b.conj();
            }
            // The lone Nyquist sample has no conjugate partner; keep its Hermitian part.
            buf[n / 2] = Complex64::new(buf[n / 2].re, 0.0);
            grid.fft(&mut buf);
            let mut row = vec![0.0; n];
            let (mut re_max, mut im_max) = (0.0_f64, 0.0_f64);
            for (m, c) in buf.iter().enumerate() {
                let k = wrap(signed(m, n) + n as i64 / 2, n);
                row[k] = weight * c.re;
                re_max = re_max.max((weight * c.re).abs());
                im_max = im_max.max((weight * c.im).abs());
            }
            (row, re_max, im_max)
        })
        .collect();
    let re_max = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let im_max = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    Ok(PhaseSpaceField {
        grid: grid.clone(),
        epsilon: eps,
        xi: xi_nodes(grid, eps),
        values: rows.into_iter().flat_map(|r| r.0).collect(),
        flavor: Flavor::Wigner,
        imag_residue: if re_max > 0.0 { im_max / re_max } else { 0.0 },
    })
}

/// Direct evaluation of the Wigner transform at an arbitrary point, through the trigonometric
/// interpolant of `f` and the symmetric z-lattice `|m| <= N/2` of spacing `h/eps` (end weights 1/2).
pub fn wigner_point(state: &WaveField, x: f64, xi: f64) -> Result<f64> {
    let grid = state.grid();
    let interp = TrigInterpolant::new(grid, state.values())?;
    let eps = state.epsilon();
    let dz = grid.spacing() / eps;
    let n = grid.len() as i64;
    let terms: Vec<Complex64> = (-n / 2..=n / 2)
        .into_par_iter()
        .map(|m| {
            let z = m as f64 * dz;
            let a = interp.eval(x + 0.5 * eps * z);
            let b = interp.eval(x - 0.5 * eps * z);
            let w = if m.abs() == n / 2 { 0.5 } else { 1.0 };
            w * Complex64::from_polar(1.0, -xi * z) * a * b.conj()
        })
        .collect();
    let acc: Complex64 = terms.iter().sum();
    Ok(dz / (2.0 * PI) * acc.re)
}

/// `W^H = W *_x gamma_eps *_xi gamma_eps` with `gamma_eps = (pi eps)^{-1/2} exp(-|.|^2/eps)`,
/// applied as the multipliers `exp(-eps z^2/4)` and `exp(-eps k^2/4)`.
pub fn husimi_transform(w: &PhaseSpaceField) -> Result<PhaseSpaceField> {
    if w.flavor != Flavor::Wigner {
        return Err(Error::InvalidParameter("husimi_transform expects a Wigner field".into()));
    }
    let grid = &w.grid;
    let n = grid.len();
    let eps = w.epsilon;
    let dz = grid.spacing() / eps;
    let z_mult: Vec<f64> = (0..n)
        .map(|m| {
            let z = signed(m, n) as f64 * dz;
            (-eps * z * z / 4.0).exp()
        })
        .collect();
    let mut smoothed: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|j| {
            let row = w.row(j);
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            for (k, &v) in row.iter().enumerate() {
                buf[wrap(k as i64 - n as i64 / 2, n)] = Complex64::new(v, 0.0);
            }
            grid.ifft(&mut buf);
            buf.iter_mut().zip(&z_mult).for_each(|(c, m)| *c *= m);
            grid.fft(&mut buf);
            (0..n).map(move |k| buf[wrap(k as i64 - n as i64 / 2, n)].re).collect::<Vec<_>>()
        })
        .collect();
    let k_mult: Vec<f64> = grid.wavenumbers().iter().map(|k| (-eps * k * k / 4.0).exp()).collect();
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut buf: Vec<Complex64> = (0..n).map(|j| Complex64::new(smoothed[j * n + k], 0.0)).collect();
            grid.fft(&mut buf);
            buf.iter_mut().zip(&k_mult).for_each(|(c, m)| *c *= m);
            grid.ifft(&mut buf);
            buf.into_iter().map(|c| c.re).collect()
        })
        .collect();
    for (k, col) in columns.iter().enumerate() {
        for (j, v) in col.iter().enumerate() {
            smoothed[j * n + k] = *v;
        }
    }
    Ok(PhaseSpaceField {
        grid: grid.clone(),
        epsilon: eps,
        xi: w.xi.clone(),
        values: smoothed,
        flavor: Flavor::Husimi,
        imag_residue: w.imag_residue,
    })
}

/// Convolution with `gamma_eps` on the periodic grid.
fn smooth(grid: &Grid1D, values: &[f64], epsilon: f64) -> Vec<f64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    grid.fft(&mut buf);
    for (c, k) in buf.iter_mut().zip(grid.wavenumbers()) {
        *c *= (-epsilon * k * k / 4.0).exp();
    }
    grid.ifft(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// One phase-space identity: a lattice quadrature of the Husimi field against its closed form in `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentIdentity {
    pub name: &'static str,
    /// Phase-space side (for pointwise identities, its maximum modulus).
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / scale` (pointwise: max over nodes).
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HusimiMoments {
    pub identities: Vec<MomentIdentity>,
}

impl HusimiMoments {
    pub fn get(&self, name: &str) -> Option<&MomentIdentity> {
        self.identities.iter().find(|m| m.name == name)
    }

    pub fn max_discrepancy(&self) -> f64 {
        self.identities.iter().map(|m| m.discrepancy).fold(0.0, f64::max)
    }
}

/// Quadratures of `1, xi, xi^2, x^2` against `W^H` next to their closed forms in `f`.
///
/// Identities: `mass`, `xi_marginal` (pointwise), `xi_first`, `xi_first_pointwise`, `xi_second`,
/// `xi_second_pointwise`, `x_second`.
pub fn husimi_moments(wh: &PhaseSpaceField, state: &WaveField) -> Result<HusimiMoments> {
    if wh.flavor != Flavor::Husimi {
        return Err(Error::InvalidParameter("husimi_moments expects a Husimi field".into()));
    }
    if wh.grid != *state.grid() || wh.epsilon != state.epsilon() {
        return Err(Error::InvalidGrid("Husimi field and state do not match".into()));
    }
    let grid = state.grid();
    ensure_len(wh.values.len(), grid.len() * grid.len())?;
    let h = grid.spacing();
    let eps = state.epsilon();
    let f = state.values();
    let df = state.gradient();
    let rho: Vec<f64> = f.iter().map(|c| c.norm_sqr()).collect();
    let grad_sq: Vec<f64> = df.iter().map(|c| c.norm_sqr()).collect();
    let current: Vec<f64> = f.iter().zip(&df).map(|(u, du)| eps * (du * u.conj()).im).collect();
    let mass = state.mass_sq();
    let grad_total = h * grad_sq.iter().sum::<f64>();
    let current_total = h * current.iter().sum::<f64>();
    let x_second = h * rho.iter().enumerate().map(|(j, r)| grid.x(j).powi(2) * r).sum::<f64>();

    let marg = wh.xi_moment(0);
    let first = wh.xi_moment(1);
    let second = wh.xi_moment(2);

    let rho_s = smooth(grid, &rho, eps);
    let cur_s = smooth(grid, &current, eps);
    let grad_s = smooth(grid, &grad_sq, eps);
    let rho_s_xx = grid.spectral_derivative_real(&rho_s, 2)?;
    let second_rhs: Vec<f64> = (0..grid.len())
        .map(|j| eps * eps * grad_s[j] - 0.25 * eps * eps * rho_s_xx[j] + 0.5 * eps * rho_s[j])
        .collect();
    let abs_cur: Vec<f64> = f.iter().zip(&df).map(|(u, du)| eps * u.norm() * du.norm()).collect();
    let cur_scale = smooth(grid, &abs_cur, eps).iter().fold(0.0_f64, |m, v| m.max(*v));

    let pointwise = |name, lhs: &[f64], rhs: &[f64], scale: f64| {
        let dev = lhs.iter().zip(rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        MomentIdentity {
            name,
            lhs: lhs.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
            rhs: rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
            discrepancy: dev / scale,
        }
    };
    let scalar = |name, lhs: f64, rhs: f64, scale: f64| MomentIdentity {
        name,
        lhs,
        rhs,
        discrepancy: (lhs - rhs).abs() / scale,
    };
    let marg_scale = rho_s.iter().fold(0.0_f64, |m, v| m.max(*v));
    let second_scale = second_rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let cs = eps * (mass * grad_total).sqrt();
    let xi_second_rhs = eps * eps * grad_total + 0.5 * eps * mass;
    let x_second_rhs = x_second + 0.5 * eps * mass;
    let identities = vec![
        scalar("mass", wh.total(), mass, mass),
        pointwise("xi_marginal", &marg, &rho_s, marg_scale),
        scalar("xi_first", h * first.iter().sum::<f64>(), current_total, current_total.abs().max(cs)),
        pointwise("xi_first_pointwise", &first, &cur_s, cur_scale),
        scalar("xi_second", h * second.iter().sum::<f64>(), xi_second_rhs, xi_second_rhs),
        pointwise("xi_second_pointwise", &second, &second_rhs, second_scale),
        scalar("x_second", wh.integrate(|x, _| x * x), x_second_rhs, x_second_rhs),
    ];
    Ok(HusimiMoments { identities })
}

/// Test function `x^p xi^q exp(-(x^2 + xi^2) / (2 width^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub x_power: i32,
    pub xi_power: i32,
    pub width: f64,
}

impl TestFunction {
    pub fn eval(&self, x: f64, xi: f64) -> f64 {
        x.powi(self.x_power) * xi.powi(self.xi_power) * (-(x * x + xi * xi) / (2.0 * self.width * self.width)).exp()
    }

    /// Powers `0..=2` in each variable with width 2.
    pub fn standard_family() -> Vec<TestFunction> {
        let mut out = Vec::with_capacity(9);
        for p in 0..=2 {
            for q in 0..=2 {
                out.push(TestFunction { x_power: p, xi_power: q, width: 2.0 });
            }
        }
        out
    }
}

/// `max_Phi |iint W Phi - int rho(x) Phi(x, v(x)) dx|` over the family.
pub fn monokinetic_gap(w: &PhaseSpaceField, rho: &Density, velocity: &[f64], family: &[TestFunction]) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::InvalidParameter("empty test family".into()));
    }
    if rho.grid() != &w.grid {
        return Err(Error::InvalidGrid("density and phase-space field live on different grids".into()));
    }
    ensure_len(velocity.len(), w.grid.len())?;
    let h = w.grid.spacing();
    let mut gap = 0.0_f64;
    for phi in family {
        let lhs = w.integrate(|x, xi| phi.eval(x, xi));
        let rhs: f64 = h * rho
            .values()
            .iter()
            .zip(velocity)
            .enumerate()
            .map(|(j, (r, v))| r * phi.eval(w.grid.x(j), *v))
            .sum::<f64>();
        gap = gap.max((lhs - rhs).abs());
    }
    Ok(gap)
}

/// Largest deviation in `W_u(x, xi) = (||u||^2 / sqrt(pi)) W_v(x/tau, tau xi - tau' x)` over
/// `samples`, relative to `max |W_u|`. `u` and `v` are states at the same time.
pub fn wigner_rescaling_residual(
    u: &WaveField,
    v: &WaveField,
    traj: &TauTrajectory,
    samples: &[(f64, f64)],
) -> Result<f64> {
    if (u.time() - v.time()).abs() > 1e-12 * u.time().abs().max(1.0) {
        return Err(Error::InvalidParameter("u and v must be taken at the same time".into()));
    }
    let (tau, tau_dot) = traj.eval(u.time())?;
    let factor = u.mass_sq() / PI.sqrt();
    let mut dev = 0.0_f64;
    let mut scale = 0.0_f64;
    for &(x, xi) in samples {
        let wu = wigner_point(u, x, xi)?;
        let wv = wigner_point(v, x / tau, tau * xi - tau_dot * x)?;
        dev = dev.max((wu - factor * wv).abs());
        scale = scale.max(wu.abs());
    }
    if scale == 0.0 {
        return Err(Error::DegenerateMass(0.0));
    }
    Ok(dev / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::gamma;

    #[test]
    fn shifted_gaussian_closed_form() {
        let grid = Grid1D::new(12.0, 256).unwrap();
        let (eps, p0) = (0.5, 0.7);
        let u = WaveField::from_fn(&grid, eps, |x| gamma(x) * Complex64::from_polar(1.0, p0 * x / eps)).unwrap();
        let w = wigner_transform(&u).unwrap();
        let mut dev = 0.0_f64;
        for j in (0..256).step_by(5) {
            let x = grid.x(j);
            for (k, &xi) in w.xi().iter().enumerate() {
                let exact = (-x * x - (xi - p0).powi(2) / (eps * eps)).exp() / (PI.sqrt() * eps);
                dev = dev.max((w.at(j, k) - exact).abs());
            }
        }
        assert!(dev < 1e-12, "{dev}");
        assert!(w.imag_residue() < 1e-12);
    }
}
