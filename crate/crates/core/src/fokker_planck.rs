//! Harmonic Fokker-Planck semigroup `e^{tL}`, `L f = f'' + (2 y f)'`, with source terms.
//!
//! Two independent kernel applications are provided: dense quadrature of the closed-form kernel and
//! the heat-equation route `e^{2t} H((e^{4t} - 1)/2, e^{2t} x)`, evaluated in Fourier variables.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure_finite, ensure_len, Error, Result};
use crate::grid::{Density, Grid1D};
use crate::metrics::{neg_sobolev, wasserstein_1d};

/// Headroom required by [`fp_decay_certificate`] rows.
pub const CERTIFICATE_HEADROOM: f64 = 0.05;

/// Relative Romberg error estimate accepted by [`fp_duhamel`].
pub const DUHAMEL_TOL: f64 = 1e-8;

/// Largest base panel count tried by [`fp_duhamel`] before it reports a refinement failure.
pub const MAX_PANELS: usize = 512;

/// `||gamma^2||_{W^{1,1}} / sqrt(pi) = 2 / sqrt(pi)`, the constant produced by the proof of the
/// `W^{-n+1,1}` source bound in one dimension.
pub fn gradient_bound_constant() -> f64 {
    2.0 / PI.sqrt()
}

/// The smaller constant `d/2` (d = 1), which the bound does not always satisfy.
pub const HALF_DIMENSION_CONSTANT: f64 = 0.5;

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be positive, got {t}")));
    }
    Ok(())
}

/// `K(t, x, y) = pi^{-1/2} (1 - e^{-4t})^{-1/2} exp(-(x - e^{-2t} y)^2 / (1 - e^{-4t}))`.
pub fn fp_kernel(t: f64, x: f64, y: f64) -> Result<f64> {
    check_time(t)?;
    let v = -(-4.0 * t).exp_m1();
    let d = x - (-2.0 * t).exp() * y;
    Ok((-d * d / v).exp() / (PI * v).sqrt())
}

/// Kernel values `K(t, x_i, y_j)` on a grid, row-major in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct FpKernelEval {
    pub t: f64,
    pub grid: Grid1D,
    pub values: Vec<f64>,
}

impl FpKernelEval {
    pub fn new(t: f64, grid: &Grid1D) -> Result<Self> {
        check_time(t)?;
        let n = grid.len();
        let values = (0..n * n)
            .into_par_iter()
            .map(|idx| fp_kernel(t, grid.x(idx / n), grid.x(idx % n)).expect("t checked"))
            .collect();
        Ok(Self { t, grid: grid.clone(), values })
    }

    /// `h sum_i K(t, x_i, y_j)` for every `j`.
    pub fn column_integrals(&self) -> Vec<f64> {
        let n = self.grid.len();
        let h = self.grid.spacing();
        (0..n).map(|j| h * (0..n).map(|i| self.values[i * n + j]).sum::<f64>()).collect()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Standard deviation of `K(t, x, .)` in `y`; dense quadrature needs it to span two cells.
fn y_width(t: f64) -> f64 {
    (-(-4.0 * t).exp_m1() / 2.0).sqrt() * (2.0 * t).exp()
}

/// Whether [`fp_apply`] uses dense quadrature at time `t` on `grid`.
pub fn dense_resolved(t: f64, grid: &Grid1D) -> bool {
    y_width(t) >= 2.0 * grid.spacing()
}

/// `(e^{tL} f0)(x_i)`: dense quadrature when the kernel is resolved in `y`, otherwise the heat route.
pub fn fp_apply(t: f64, grid: &Grid1D, f0: &[f64]) -> Result<Vec<f64>> {
    if dense_resolved(t, grid) {
        fp_apply_dense(t, grid, f0)
    } else {
        fp_apply_heat(t, grid, f0)
    }
}

fn check_input(t: f64, grid: &Grid1D, f0: &[f64]) -> Result<()> {
    check_time(t)?;
    ensure_len(f0.len(), grid.len())?;
    ensure_finite(f0, "Fokker-Planck datum")
}

/// `h sum_j K(t, x_i, y_j) f0(y_j)`.
pub fn fp_apply_dense(t: f64, grid: &Grid1D, f0: &[f64]) -> Result<Vec<f64>> {
    check_input(t, grid, f0)?;
    let h = grid.spacing();
    let v = -(-4.0 * t).exp_m1();
    let decay = (-2.0 * t).exp();
    let norm = h / (PI * v).sqrt();
    let nodes = grid.nodes();
    Ok(nodes
        .par_iter()
        .map(|&x| {
            norm * nodes
                .iter()
                .zip(f0)
                .filter(|(_, f)| **f != 0.0)
                .map(|(&y, f)| {
                    let d = x - decay * y;
                    f * (-d * d / v).exp()
                })
                .sum::<f64>()
        })
        .collect())
}

/// `e^{2t} H(s, e^{2t} x)` with `s = (e^{4t} - 1)/2` and `H(s) = e^{s Delta / 2} f0`, computed through
/// `g^(k) = exp(-(1 - e^{-4t}) k^2 / 4) f0^(e^{-2t} k)` with the transform of `f0` evaluated directly.
pub fn fp_apply_heat(t: f64, grid: &Grid1D, f0: &[f64]) -> Result<Vec<f64>> {
    check_input(t, grid, f0)?;
    let n = grid.len();
    let h = grid.spacing();
    let l = grid.half_width();
    let ks = grid.wavenumbers();
    let decay = (-2.0 * t).exp();
    let v = -(-4.0 * t).exp_m1();
    let mut spec: Vec<Complex64> = ks
        .par_iter()
        .map(|&k| {
            let w = k * decay;
            let step = Complex64::from_polar(1.0, -w * h);
            let mut phase = Complex64::from_polar(1.0, w * l);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &f) in f0.iter().enumerate() {
                if j % 64 == 0 {
                    phase = Complex64::from_polar(1.0, -w * grid.x(j));
                }
                acc += f * phase;
                phase *= step;
            }
            h * acc * (-v * k * k / 4.0).exp() * Complex64::from_polar(1.0, -k * l)
        })
        .collect();
    if n >= 2 {
        // The Nyquist mode has no partner and is dropped.
        spec[n / 2] = Complex64::new(0.0, 0.0);
    }
    grid.ifft(&mut spec);
    Ok(spec.into_iter().map(|c| c.re / h).collect())
}

/// `max |dense - heat| / max |dense|` at time `t`.
pub fn fp_from_heat_check(grid: &Grid1D, f0: &[f64], t: f64) -> Result<f64> {
    let a = fp_apply_dense(t, grid, f0)?;
    let b = fp_apply_heat(t, grid, f0)?;
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale)
}

/// `L f = f'' + (2 y f)'` by spectral differentiation.
pub fn fp_generator(grid: &Grid1D, f: &[f64]) -> Result<Vec<f64>> {
    let second = grid.spectral_derivative_real(f, 2)?;
    let flux: Vec<f64> = f.iter().enumerate().map(|(j, v)| 2.0 * grid.x(j) * v).collect();
    let first = grid.spectral_derivative_real(&flux, 1)?;
    Ok(second.iter().zip(&first).map(|(a, b)| a + b).collect())
}

/// `max |e^{tL} f0^{(n)} - e^{-2nt} (e^{tL} f0)^{(n)}| / max |e^{tL} f0^{(n)}|`.
pub fn derivative_commutation_residual(grid: &Grid1D, f0: &[f64], n: u32, t: f64) -> Result<f64> {
    let lhs = fp_apply(t, grid, &grid.spectral_derivative_real(f0, n)?)?;
    let rhs = grid.spectral_derivative_real(&fp_apply(t, grid, f0)?, n)?;
    let factor = (-2.0 * n as f64 * t).exp();
    let scale = lhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(lhs.iter().zip(&rhs).map(|(a, b)| (a - factor * b).abs()).fold(0.0, f64::max) / scale)
}

/// Solution of `f' = L f + d^n h`, `f(0) = 0`, at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Duhamel {
    pub t: f64,
    pub order: u32,
    /// `F(t) = int_0^t e^{-2n(t-u)} e^{(t-u)L} h(u) du`, so that `f = d^n F`.
    pub integral: Vec<f64>,
    /// `f(t)`.
    pub value: Vec<f64>,
    /// Romberg estimate of the time-quadrature error, relative to `max |F|`.
    pub richardson_error: f64,
}

/// Trapezoid sums on `m`, `2m` and `4m` panels.
fn trapezoid_levels<G: Fn(f64) -> Result<Vec<f64>> + Sync>(
    g: &G,
    t: f64,
    m: usize,
    len: usize,
) -> Result<[Vec<f64>; 3]> {
    let fine = 4 * m;
    let du = t / fine as f64;
    let samples: Vec<Vec<f64>> = (0..=fine).into_par_iter().map(|i| g(i as f64 * du)).collect::<Result<_>>()?;
    let mut levels = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    for (level, stride) in [(0usize, 4usize), (1, 2), (2, 1)] {
        let step = du * stride as f64;
        for i in (0..=fine).step_by(stride) {
            let w = if i == 0 || i == fine { 0.5 } else { 1.0 };
            for (acc, v) in levels[level].iter_mut().zip(&samples[i]) {
                *acc += w * step * v;
            }
        }
    }
    Ok(levels)
}

/// `f(t) = d^n int_0^t e^{-2n(t-u)} e^{(t-u)L} h(u) du` by Romberg extrapolation of composite
/// trapezoid sums on `m`, `2m` and `4m` panels, doubling `m` from `intervals` until the estimate
/// falls below [`DUHAMEL_TOL`].
pub fn fp_duhamel<H: Fn(f64) -> Vec<f64> + Sync>(
    grid: &Grid1D,
    h: H,
    n: u32,
    t: f64,
    intervals: usize,
) -> Result<Duhamel> {
    check_time(t)?;
    if n > 4 {
        return Err(Error::InvalidParameter(format!("derivative order must be at most 4, got {n}")));
    }
    if intervals < 2 {
        return Err(Error::InvalidParameter("need at least two time panels".into()));
    }
    let len = grid.len();
    let integrand = |u: f64| -> Result<Vec<f64>> {
        let hu = h(u);
        ensure_len(hu.len(), len)?;
        let lag = t - u;
        let damp = (-2.0 * n as f64 * lag).exp();
        let moved = if lag <= 0.0 { hu } else { fp_apply(lag, grid, &hu)? };
        Ok(moved.into_iter().map(|v| damp * v).collect())
    };
    let mut m = intervals;
    loop {
        let [t1, t2, t4] = trapezoid_levels(&integrand, t, m, len)?;
        let mut integral = vec![0.0; len];
        let mut diff = 0.0_f64;
        for j in 0..len {
            let r1 = (4.0 * t2[j] - t1[j]) / 3.0;
            let r2 = (4.0 * t4[j] - t2[j]) / 3.0;
            integral[j] = (16.0 * r2 - r1) / 15.0;
            diff = diff.max((r2 - r1).abs() / 15.0);
        }
        let scale = integral.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let richardson_error = if scale > 0.0 { diff / scale } else { 0.0 };
        if richardson_error <= DUHAMEL_TOL {
            let value = grid.spectral_derivative_real(&integral, n)?;
            return Ok(Duhamel { t, order: n, integral, value, richardson_error });
        }
        if m >= MAX_PANELS {
            return Err(Error::Refinement(format!(
                "time quadrature not converged: Romberg estimate {richardson_error:.3e} with {m} panels"
            )));
        }
        m *= 2;
    }
}
/// Solution of `f' = L f + d_t d^n h`, `f(0) = 0`, through
/// `f = L g + d^n h(t) - e^{-2nt} d^n (e^{tL} h(0))` with `g' = L g + d^n h`.
pub fn fp_duhamel_time_derivative<H: Fn(f64) -> Vec<f64> + Sync>(
    grid: &Grid1D,
    h: H,
    n: u32,
    t: f64,
    intervals: usize,
) -> Result<Vec<f64>> {
    let g = fp_duhamel(grid, &h, n, t, intervals)?;
    let lg = fp_generator(grid, &g.value)?;
    let now = grid.spectral_derivative_real(&h(t), n)?;
    let start = grid.spectral_derivative_real(&fp_apply(t, grid, &h(0.0))?, n)?;
    let damp = (-2.0 * n as f64 * t).exp();
    Ok((0..grid.len()).map(|j| lg[j] + now[j] - damp * start[j]).collect())
}

/// One row of the source-decay certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateRow {
    pub t: f64,
    pub n: u32,
    /// `||f(t)||_{W^{-n,1}}`.
    pub lhs_a: f64,
    /// `e^{-2nt} int_0^t e^{2nu} |h|(u) du`.
    pub bound_a: f64,
    /// `||f(t)||_{W^{-n+1,1}}`.
    pub lhs_b: f64,
    /// `C e^{-2nt} int_0^t e^{2nu} (1 - e^{-4(t-u)})^{-1/2} |h|(u) du` with `C = 2/sqrt(pi)`.
    pub bound_b: f64,
    /// Same integral with the constant `d/2`.
    pub bound_b_half: f64,
    /// `C e^{-2(n-1)t} int_0^t e^{-2u} (1 - e^{-4u})^{-1/2} du sup_u e^{2(n-1)u} |h|(u)`.
    pub bound_b_uniform: f64,
}

impl CertificateRow {
    pub fn headroom_a(&self) -> f64 {
        self.bound_a / self.lhs_a - 1.0
    }

    pub fn headroom_b(&self) -> f64 {
        self.bound_b / self.lhs_b - 1.0
    }

    pub fn passes(&self) -> bool {
        self.headroom_a() >= CERTIFICATE_HEADROOM
            && self.headroom_b() >= CERTIFICATE_HEADROOM
            && self.bound_b_uniform >= self.bound_b * (1.0 - 1e-12)
    }

    pub fn half_constant_holds(&self) -> bool {
        self.bound_b_half >= self.lhs_b
    }
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let m = 2 * panels.max(1);
    let d = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * d);
    }
    acc * d / 3.0
}

/// Tabulates both sides of the source-term decay bounds for `f' = L f + d^n h` at each `t`.
///
/// The singular weight of the second bound is removed by `e^{2w} = cosh(theta)`, which turns
/// `dw / sqrt(1 - e^{-4w})` into `d theta / 2`.
pub fn fp_decay_certificate<H: Fn(f64) -> Vec<f64> + Sync>(
    grid: &Grid1D,
    h: H,
    n: u32,
    times: &[f64],
    intervals: usize,
) -> Result<Vec<CertificateRow>> {
    if n == 0 {
        return Err(Error::InvalidParameter("certificate needs a derivative order n >= 1".into()));
    }
    let mass = |u: f64| grid.l1_norm(&h(u)).expect("source values are finite");
    let nn = n as f64;
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let sol = fp_duhamel(grid, &h, n, t, intervals)?;
        let lhs_a = neg_sobolev(&sol.value, grid, n)?;
        let lhs_b = neg_sobolev(&sol.value, grid, n - 1)?;
        let bound_a = simpson(|u| (-2.0 * nn * (t - u)).exp() * mass(u), 0.0, t, 256);
        let theta_max = (2.0 * t).exp().acosh();
        let singular = 0.5
            * simpson(
                |theta| {
                    let w = 0.5 * theta.cosh().ln();
                    (-2.0 * nn * w).exp() * mass(t - w)
                },
                0.0,
                theta_max,
                256,
            );
        let sup = (0..=512)
            .map(|i| {
                let u = t * i as f64 / 512.0;
                (2.0 * (nn - 1.0) * u).exp() * mass(u)
            })
            .fold(0.0, f64::max);
        let weight = 0.5 * (0.5 * PI - (-2.0 * t).exp().asin());
        let c = gradient_bound_constant();
        rows.push(CertificateRow {
            t,
            n,
            lhs_a,
            bound_a,
            lhs_b,
            bound_b: c * singular,
            bound_b_half: HALF_DIMENSION_CONSTANT * singular,
            bound_b_uniform: c * (-2.0 * (nn - 1.0) * t).exp() * weight * sup,
        });
    }
    Ok(rows)
}

/// Equilibrium `pi^{-1/2} gamma^2` on the grid.
pub fn equilibrium(grid: &Grid1D) -> Result<Density> {
    Density::from_fn(grid, |y| (-y * y).exp() / PI.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionRow {
    pub t: f64,
    /// Distance to equilibrium at time `t`.
    pub distance: f64,
    /// Distance at time 0.
    pub initial: f64,
    /// `distance / initial`.
    pub factor: f64,
}

fn distance_rows(p: f64, f0: &Density, times: &[f64]) -> Result<Vec<ContractionRow>> {
    let grid = f0.grid();
    if (f0.mass() - 1.0).abs() > 1e-8 {
        return Err(Error::DegenerateMass(f0.mass()));
    }
    let eq = equilibrium(grid)?;
    let initial = wasserstein_1d(p, f0, &eq)?;
    times
        .iter()
        .map(|&t| {
            let ft = Density::new(grid, fp_apply(t, grid, f0.values())?)?;
            let distance = wasserstein_1d(p, &ft, &eq)?;
            Ok(ContractionRow { t, distance, initial, factor: if initial > 0.0 { distance / initial } else { 0.0 } })
        })
        .collect()
}

/// `W_2(e^{tL} f0, pi^{-1/2} gamma^2)` against `e^{-2t} W_2(f0, pi^{-1/2} gamma^2)`.
pub fn w2_contraction_check(f0: &Density, times: &[f64]) -> Result<Vec<ContractionRow>> {
    distance_rows(2.0, f0, times)
}

/// `W_1(e^{sL} f0, pi^{-1/2} gamma^2)` along the `s` variable.
pub fn w1_decay_in_s(f0: &Density, s_values: &[f64]) -> Result<Vec<ContractionRow>> {
    distance_rows(1.0, f0, s_values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::normal_pdf;

    #[test]
    fn kernel_closed_form_values() {
        assert!(fp_kernel(0.0, 0.0, 0.0).is_err());
        let t: f64 = 0.3;
        let v = 1.0 - (-4.0 * t).exp();
        let k = fp_kernel(t, 0.4, 0.0).unwrap();
        assert!((k - normal_pdf(0.4, 0.0, v / 2.0)).abs() < 1e-14);
        let far = fp_kernel(30.0, 0.7, 5.0).unwrap();
        assert!((far - (-0.49f64).exp() / PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn dense_and_heat_agree_on_shifted_gaussian() {
        let grid = Grid1D::new(8.0, 256).unwrap();
        let f0 = grid.sample(|y| normal_pdf(y, 0.8, 0.3));
        for t in [0.25, 0.5, 1.5] {
            assert!(fp_from_heat_check(&grid, &f0, t).unwrap() < 1e-10);
        }
    }
}
