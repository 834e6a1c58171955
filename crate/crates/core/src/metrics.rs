//! Wasserstein distances on the line, relative entropy bounds and negative Sobolev norms.

use crate::error::{ensure_finite, ensure_len, Error, Result};
use crate::grid::{Density, Grid1D, TrigInterpolant};

/// Densities passed to [`wasserstein_1d`] must have mass within this distance of one.
pub const MASS_TOL: f64 = 1e-8;

/// CDF values outside `[TAIL_CUT, 1 - TAIL_CUT]` are skipped in the quantile quadrature.
pub const TAIL_CUT: f64 = 1e-12;

fn probability(rho: &Density) -> Result<Density> {
    if (rho.mass() - 1.0).abs() > MASS_TOL {
        return Err(Error::DegenerateMass(rho.mass()));
    }
    rho.normalized()
}

/// `W_p(rho1, rho2)` for `p >= 1`.
///
/// `p = 1` integrates `|F1 - F2|`. For `p > 1` every node is pushed through the monotone map
/// `Q2 o F1`, with `F2` inverted on its trigonometric interpolant.
pub fn wasserstein_1d(p: f64, rho1: &Density, rho2: &Density) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    if rho1.grid() != rho2.grid() {
        return Err(Error::InvalidGrid("densities live on different grids".into()));
    }
    let a = probability(rho1)?;
    let b = probability(rho2)?;
    let grid = a.grid();
    if p == 1.0 {
        let (fa, fb) = (a.cdf(), b.cdf());
        let diff: Vec<f64> = fa.iter().zip(&fb).map(|(x, y)| x - y).collect();
        return grid.l1_norm(&diff);
    }
    let fa = a.cdf();
    let fb = b.cdf();
    let inverse = QuantileInverter::new(grid, b.values(), fb)?;
    let h = grid.spacing();
    let mut acc = 0.0;
    for (j, (&q, &w)) in fa.iter().zip(a.values()).enumerate() {
        if w == 0.0 || !(TAIL_CUT..=1.0 - TAIL_CUT).contains(&q) {
            continue;
        }
        let x = grid.x(j);
        acc += h * w * (x - inverse.quantile(q)).abs().powf(p);
    }
    Ok(acc.powf(1.0 / p))
}

struct QuantileInverter<'a> {
    grid: &'a Grid1D,
    cdf: Vec<f64>,
    interp: TrigInterpolant,
}

impl<'a> QuantileInverter<'a> {
    fn new(grid: &'a Grid1D, density: &[f64], cdf: Vec<f64>) -> Result<Self> {
        Ok(Self { grid, cdf, interp: TrigInterpolant::from_real(grid, density)? })
    }

    fn quantile(&self, q: f64) -> f64 {
        let n = self.cdf.len();
        let idx = self.cdf.partition_point(|&v| v < q);
        let mut lo = if idx == 0 { self.grid.x(0) } else { self.grid.x(idx - 1) };
        let mut hi = if idx >= n { self.grid.half_width() } else { self.grid.x(idx) };
        if idx == 0 {
            return lo;
        }
        let mut x = lo + (hi - lo) * 0.5;
        for _ in 0..100 {
            let (rho, _, prim) = self.interp.eval_full(x);
            let g = prim.re - q;
            if g.abs() <= 1e-17 {
                break;
            }
            if g > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let newton = if rho.re > 0.0 { x - g / rho.re } else { f64::NAN };
            x = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-15 {
                break;
            }
        }
        x
    }
}

/// Returns `(int rho ln(rho/ref), ||rho - ref||_1^2 / (2 ||ref||_1))`; the first dominates the second.
pub fn csiszar_kullback_gap(rho: &Density, reference: &Density) -> Result<(f64, f64)> {
    if rho.grid() != reference.grid() {
        return Err(Error::InvalidGrid("densities live on different grids".into()));
    }
    let m = reference.mass();
    if m <= 0.0 || (rho.mass() - m).abs() > 1e-6 * m {
        return Err(Error::DegenerateMass(rho.mass()));
    }
    let grid = rho.grid();
    let integrand: Vec<f64> = rho
        .values()
        .iter()
        .zip(reference.values())
        .map(|(&r, &g)| if r > 0.0 { r * (r / g).ln() } else { 0.0 })
        .collect();
    let lhs = grid.quadrature(&integrand)?;
    let l1 = rho.l1_distance(reference)?;
    Ok((lhs, l1 * l1 / (2.0 * m)))
}

fn mean_tolerance(grid: &Grid1D, f: &[f64]) -> Result<f64> {
    Ok(1e-10 * (1.0 + grid.l1_norm(f)?))
}

/// `||f||_{W^{-1,1}}` as the L1 norm of the primitive of a zero-mean `f`.
pub fn neg_sobolev_w11(f: &[f64], grid: &Grid1D) -> Result<f64> {
    neg_sobolev(f, grid, 1)
}

/// `||f||_{W^{-n,1}}` through `n` iterated primitives; each must have zero mean.
pub fn neg_sobolev(f: &[f64], grid: &Grid1D, order: u32) -> Result<f64> {
    ensure_len(f.len(), grid.len())?;
    ensure_finite(f, "neg_sobolev")?;
    let mut current = f.to_vec();
    for _ in 0..order {
        let mean = grid.quadrature(&current)?;
        if mean.abs() > mean_tolerance(grid, &current)? {
            return Err(Error::NonzeroMean(mean));
        }
        current = grid.primitive(&current)?;
    }
    grid.l1_norm(&current)
}

/// Interpolation bound `C0 ||f||_{W^{-1,1}}^{1-delta} ||f||_{L1}^delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpBound {
    pub delta: f64,
    pub constant: f64,
    pub w11: f64,
    pub l1: f64,
    pub value: f64,
}

/// Constant produced by Gaussian smoothing at scale `eta` followed by optimisation in `eta`.
pub fn interp_constant(delta: f64) -> f64 {
    let alpha = 1.0 - delta;
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let a = libm::tgamma(1.0 - 0.5 * delta) / sqrt_pi;
    let b = 2.0 / sqrt_pi * libm::tgamma(1.5 - 0.5 * delta);
    let weight = |e: f64| if e == 0.0 { 1.0 } else { e.powf(e) };
    a.powf(delta) * b.powf(alpha) / (weight(alpha) * weight(delta))
}

pub fn interp_norm_bound(f: &[f64], grid: &Grid1D, delta: f64) -> Result<InterpBound> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!("delta must lie in [0, 1], got {delta}")));
    }
    let w11 = neg_sobolev_w11(f, grid)?;
    let l1 = grid.l1_norm(f)?;
    let constant = interp_constant(delta);
    Ok(InterpBound { delta, constant, w11, l1, value: constant * w11.powf(1.0 - delta) * l1.powf(delta) })
}

/// Lower estimate of `||f||_{W^{-1+delta,1}}` by pairing with Holder-`(1-delta)` test functions
/// `|x-c|^a` and `sgn(x-c)|x-c|^a / 2^(1-a)` (unit seminorm), maximised over centres `c` on the grid.
pub fn holder_dual_lower_bound(f: &[f64], grid: &Grid1D, delta: f64) -> Result<f64> {
    ensure_len(f.len(), grid.len())?;
    let alpha = 1.0 - delta;
    let odd_scale = 2f64.powf(-delta);
    let nodes = grid.nodes();
    let mut best = 0.0_f64;
    for &c in nodes.iter().step_by(2) {
        let (mut even, mut odd) = (0.0, 0.0);
        for (&x, &v) in nodes.iter().zip(f) {
            let r = (x - c).abs().powf(alpha);
            even += v * r;
            odd += v * r * (x - c).signum() * odd_scale;
        }
        best = best.max(even.abs()).max(odd.abs());
    }
    Ok(best * grid.spacing())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::normal_pdf;

    fn grid() -> Grid1D {
        Grid1D::new(16.0, 512).unwrap()
    }

    #[test]
    fn gaussian_w2() {
        let g = grid();
        let a = Density::from_fn(&g, |x| normal_pdf(x, 0.0, 0.5)).unwrap();
        let b = Density::from_fn(&g, |x| normal_pdf(x, 1.0, 0.5)).unwrap();
        assert!((wasserstein_1d(2.0, &a, &b).unwrap() - 1.0).abs() < 1e-10);
        let c = Density::from_fn(&g, |x| normal_pdf(x, -0.5, 2.0)).unwrap();
        let exact = (0.25f64 + (2f64.sqrt() - 0.5f64.sqrt()).powi(2)).sqrt();
        assert!((wasserstein_1d(2.0, &a, &c).unwrap() - exact).abs() < 1e-10);
    }

    #[test]
    fn translation_invariance() {
        let g = grid();
        let shape = |x: f64| 0.6 * normal_pdf(x, -1.0, 0.4) + 0.4 * normal_pdf(x, 1.5, 1.0);
        let a = Density::from_fn(&g, shape).unwrap();
        let b = Density::from_fn(&g, |x| shape(x - 0.7)).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0] {
            let w = wasserstein_1d(p, &a, &b).unwrap();
            assert!((w - 0.7).abs() < 1e-9, "p={p}: {w}");
        }
        assert!(wasserstein_1d(2.0, &a, &a).unwrap() < 1e-8);
    }

    #[test]
    fn rejects_unnormalized() {
        let g = grid();
        let a = Density::from_fn(&g, |x| 2.0 * normal_pdf(x, 0.0, 1.0)).unwrap();
        assert!(wasserstein_1d(1.0, &a, &a).is_err());
        assert!(wasserstein_1d(0.5, &a, &a).is_err());
    }

    #[test]
    fn neg_sobolev_cases() {
        let g = grid();
        let bump = |x: f64| (-(x - 0.4f64).powi(2)).exp();
        let db = g.sample(|x| -2.0 * (x - 0.4) * bump(x));
        let l1 = g.quadrature(&g.sample(bump)).unwrap();
        assert!((neg_sobolev_w11(&db, &g).unwrap() - l1).abs() < 1e-10);
        assert_eq!(neg_sobolev_w11(&vec![0.0; 512], &g).unwrap(), 0.0);
        assert!(neg_sobolev_w11(&g.sample(bump), &g).is_err());
    }

    #[test]
    fn interp_constant_limits() {
        assert!((interp_constant(0.0) - 1.0).abs() < 1e-12);
        assert!((interp_constant(1.0) - 1.0).abs() < 1e-12);
        assert!(interp_constant(0.5) > 1.0);
    }
}
