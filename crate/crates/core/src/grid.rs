//! Uniform periodic grids, spectral calculus and quadrature.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{ensure_finite, ensure_len, Error, Result};

/// Uniform periodic grid on `[-L, L)` with `N` nodes `x_j = -L + j h`.
#[derive(Clone)]
pub struct Grid1D {
    half_width: f64,
    n: usize,
    spacing: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid1D")
            .field("half_width", &self.half_width)
            .field("n", &self.n)
            .field("spacing", &self.spacing)
            .finish()
    }
}

impl PartialEq for Grid1D {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.half_width == other.half_width
    }
}

impl Grid1D {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width must be positive, got {half_width}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("node count must be a power of two >= 8, got {n}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            half_width,
            n,
            spacing: 2.0 * half_width / n as f64,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Angular wavenumbers in FFT order; the Nyquist mode carries `-pi/h`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let dk = PI / self.half_width;
        (0..self.n)
            .map(|m| {
                let m = m as i64;
                let n = self.n as i64;
                let signed = if m < n / 2 { m } else { m - n };
                signed as f64 * dk
            })
            .collect()
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.n).map(|j| f(self.x(j))).collect()
    }

    pub fn sample_complex<F: Fn(f64) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        (0..self.n).map(|j| f(self.x(j))).collect()
    }

    /// Unnormalized forward DFT in place.
    pub fn fft(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// Inverse DFT in place, including the `1/N` factor.
    pub fn ifft(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let scale = 1.0 / self.n as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }

    /// Periodic trapezoid rule `h * sum(values)`.
    pub fn quadrature(&self, values: &[f64]) -> Result<f64> {
        ensure_len(values.len(), self.n)?;
        ensure_finite(values, "quadrature")?;
        Ok(self.spacing * values.iter().sum::<f64>())
    }

    /// L1 norm of the trigonometric interpolant of signed nodal data.
    ///
    /// Sign changes between nodes are located on the interpolant and the integral is summed as
    /// `sum |P(r_{i+1}) - P(r_i)|` over consecutive roots of the primitive `P`. Crossings whose
    /// endpoint values are below `1e-13 max|f|` use a linear root and contribute negligibly.
    pub fn l1_norm(&self, values: &[f64]) -> Result<f64> {
        ensure_len(values.len(), self.n)?;
        ensure_finite(values, "l1_norm")?;
        let prim = self.primitive(values)?;
        let total = self.quadrature(values)?;
        let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            return Ok(0.0);
        }
        let small = 1e-13 * peak;
        let h = self.spacing;
        let mut interp: Option<TrigInterpolant> = None;
        let mut roots: Vec<f64> = Vec::new();
        for j in 0..self.n {
            let a = values[j];
            let b = values[(j + 1) % self.n];
            if a == 0.0 {
                roots.push(prim[j]);
                continue;
            }
            if a * b >= 0.0 {
                continue;
            }
            let theta = a / (a - b);
            if a.abs().max(b.abs()) < small {
                roots.push(prim[j] + 0.5 * a * theta * h);
                continue;
            }
            let p = interp.get_or_insert_with(|| TrigInterpolant::from_real(self, values).expect("sized"));
            let x0 = self.x(j);
            let (mut lo, mut hi) = (x0, x0 + h);
            let mut x = x0 + theta * h;
            let mut at = p.eval_full(x);
            for _ in 0..60 {
                let g = at.0.re;
                if g.abs() <= 1e-15 * peak {
                    break;
                }
                if (g > 0.0) == (a > 0.0) {
                    lo = x;
                } else {
                    hi = x;
                }
                let newton = x - g / at.1.re;
                x = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
                at = p.eval_full(x);
                if hi - lo < 1e-15 * h {
                    break;
                }
            }
            roots.push(at.2.re);
        }
        if roots.is_empty() {
            return Ok(total.abs());
        }
        let mut acc = (roots[0] + total - roots[roots.len() - 1]).abs();
        for w in roots.windows(2) {
            acc += (w[1] - w[0]).abs();
        }
        Ok(acc)
    }

    /// Exact derivative of the trigonometric interpolant. Odd orders drop the Nyquist mode.
    pub fn spectral_derivative(&self, field: &[Complex64], order: u32) -> Result<Vec<Complex64>> {
        ensure_len(field.len(), self.n)?;
        if field.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("spectral_derivative"));
        }
        let mut buf = field.to_vec();
        if order == 0 {
            return Ok(buf);
        }
        self.fft(&mut buf);
        let ks = self.wavenumbers();
        for (m, (c, &k)) in buf.iter_mut().zip(&ks).enumerate() {
            if m == self.n / 2 && order % 2 == 1 {
                *c = Complex64::new(0.0, 0.0);
            } else {
                *c *= Complex64::new(0.0, k).powu(order);
            }
        }
        self.ifft(&mut buf);
        Ok(buf)
    }

    pub fn spectral_derivative_real(&self, values: &[f64], order: u32) -> Result<Vec<f64>> {
        let field: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Ok(self.spectral_derivative(&field, order)?.into_iter().map(|c| c.re).collect())
    }

    /// `F(x_j) = int_{-L}^{x_j} f` for the trigonometric interpolant of `f`.
    pub fn primitive(&self, values: &[f64]) -> Result<Vec<f64>> {
        ensure_len(values.len(), self.n)?;
        ensure_finite(values, "primitive")?;
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft(&mut buf);
        let mean = buf[0].re / self.n as f64;
        let ks = self.wavenumbers();
        for (m, c) in buf.iter_mut().enumerate() {
            if m == 0 || m == self.n / 2 {
                *c = Complex64::new(0.0, 0.0);
            } else {
                *c /= Complex64::new(0.0, ks[m]);
            }
        }
        self.ifft(&mut buf);
        let g0 = buf[0].re;
        Ok((0..self.n)
            .map(|j| mean * (self.x(j) + self.half_width) + buf[j].re - g0)
            .collect())
    }

    /// Values shifted by a fraction of a cell: returns `f(x_j + shift)`.
    pub fn spectral_shift(&self, field: &[Complex64], shift: f64) -> Result<Vec<Complex64>> {
        ensure_len(field.len(), self.n)?;
        let mut buf = field.to_vec();
        self.fft(&mut buf);
        let ks = self.wavenumbers();
        for (m, c) in buf.iter_mut().enumerate() {
            if m == self.n / 2 {
                *c *= (ks[m] * shift).cos();
            } else {
                *c *= Complex64::from_polar(1.0, ks[m] * shift);
            }
        }
        self.ifft(&mut buf);
        Ok(buf)
    }
}

/// Trigonometric interpolant of nodal data, evaluable anywhere on the line.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    origin: f64,
    dk: f64,
    coeffs: Vec<Complex64>,
}

impl TrigInterpolant {
    pub fn new(grid: &Grid1D, field: &[Complex64]) -> Result<Self> {
        ensure_len(field.len(), grid.len())?;
        let mut coeffs = field.to_vec();
        grid.fft(&mut coeffs);
        let scale = 1.0 / grid.len() as f64;
        coeffs.iter_mut().for_each(|c| *c *= scale);
        Ok(Self { origin: -grid.half_width(), dk: PI / grid.half_width(), coeffs })
    }

    pub fn from_real(grid: &Grid1D, values: &[f64]) -> Result<Self> {
        let field: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::new(grid, &field)
    }

    /// Returns `(p(x), p'(x), int_{-L}^x p)`.
    pub fn eval_full(&self, x: f64) -> (Complex64, Complex64, Complex64) {
        let n = self.coeffs.len();
        let half = n / 2;
        let theta = x - self.origin;
        let step = Complex64::from_polar(1.0, self.dk * theta);
        let c0 = self.coeffs[0];
        let mut value = c0;
        let mut deriv = Complex64::new(0.0, 0.0);
        let mut prim = c0 * theta;
        let mut w = Complex64::new(1.0, 0.0);
        for m in 1..half {
            w = if m % 32 == 0 { Complex64::from_polar(1.0, m as f64 * self.dk * theta) } else { w * step };
            let k = m as f64 * self.dk;
            let wc = w.conj();
            let cp = self.coeffs[m];
            let cm = self.coeffs[n - m];
            value += cp * w + cm * wc;
            deriv += Complex64::new(0.0, k) * (cp * w - cm * wc);
            prim += (cp * (w - 1.0) - cm * (wc - 1.0)) / Complex64::new(0.0, k);
        }
        let kn = half as f64 * self.dk;
        let cn = self.coeffs[half];
        value += cn * (kn * theta).cos();
        deriv -= cn * kn * (kn * theta).sin();
        prim += cn * (kn * theta).sin() / kn;
        (value, deriv, prim)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_full(x).0
    }
}

/// `gamma(x) = exp(-x^2/2)`.
pub fn gamma(x: f64) -> f64 {
    (-0.5 * x * x).exp()
}

/// `gamma(x)^2 = exp(-x^2)`, of integral `sqrt(pi)`.
pub fn gamma_sq(x: f64) -> f64 {
    (-x * x).exp()
}

/// Normal probability density with the given mean and variance.
pub fn normal_pdf(x: f64, mean: f64, variance: f64) -> f64 {
    (-(x - mean).powi(2) / (2.0 * variance)).exp() / (2.0 * PI * variance).sqrt()
}

/// Nonnegative nodal density with cached moments.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    grid: Grid1D,
    values: Vec<f64>,
    mass: f64,
    first: f64,
    second: f64,
    entropy: f64,
}

/// Densities with mass below this threshold have no normalized moments.
pub const MIN_MASS: f64 = 1e-12;

impl Density {
    /// Tiny negative values (roundoff, at most `1e-12` of the peak) are clamped to zero.
    pub fn new(grid: &Grid1D, mut values: Vec<f64>) -> Result<Self> {
        ensure_len(values.len(), grid.len())?;
        ensure_finite(&values, "Density")?;
        let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for v in values.iter_mut() {
            if *v < 0.0 {
                if *v < -1e-12 * peak {
                    return Err(Error::InvalidParameter(format!("negative density value {v:e}")));
                }
                *v = 0.0;
            }
        }
        let h = grid.spacing();
        let (mut m0, mut m1, mut m2, mut ent) = (0.0, 0.0, 0.0, 0.0);
        for (j, &v) in values.iter().enumerate() {
            let x = grid.x(j);
            m0 += v;
            m1 += x * v;
            m2 += x * x * v;
            if v > 0.0 {
                ent += v * v.ln();
            }
        }
        Ok(Self { grid: grid.clone(), values, mass: h * m0, first: h * m1, second: h * m2, entropy: h * ent })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: &Grid1D, f: F) -> Result<Self> {
        Self::new(grid, grid.sample(f))
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `int x rho`.
    pub fn first_moment(&self) -> f64 {
        self.first
    }

    /// `int x^2 rho`.
    pub fn second_moment(&self) -> f64 {
        self.second
    }

    /// `int rho ln rho`, with `0 ln 0 = 0`.
    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    fn require_mass(&self) -> Result<()> {
        if self.mass < MIN_MASS {
            Err(Error::DegenerateMass(self.mass))
        } else {
            Ok(())
        }
    }

    pub fn mean(&self) -> Result<f64> {
        self.require_mass()?;
        Ok(self.first / self.mass)
    }

    pub fn variance(&self) -> Result<f64> {
        let m = self.mean()?;
        Ok(self.second / self.mass - m * m)
    }

    pub fn normalized(&self) -> Result<Self> {
        self.require_mass()?;
        let s = 1.0 / self.mass;
        Self::new(&self.grid, self.values.iter().map(|v| v * s).collect())
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(&self.grid, self.values.iter().map(|v| v * factor).collect())
    }

    /// Cumulative distribution `int_{-L}^{x_j} rho` at the nodes.
    pub fn cdf(&self) -> Vec<f64> {
        self.grid.primitive(&self.values).expect("density values are finite and sized")
    }

    pub fn l1_distance(&self, other: &Density) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("densities live on different grids".into()));
        }
        let diff: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        self.grid.l1_norm(&diff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_layout() {
        let g = Grid1D::new(16.0, 8).unwrap();
        assert_eq!(g.x(0), -16.0);
        assert_eq!(g.spacing(), 4.0);
        assert_eq!(g.x(7), 12.0);
        assert_eq!(Grid1D::new(1.0, 8).unwrap().spacing(), 0.25);
        assert!(Grid1D::new(16.0, 7).is_err());
        assert!(Grid1D::new(0.0, 8).is_err());
        assert!(Grid1D::new(-1.0, 16).is_err());
        assert!(Grid1D::new(1.0, 4).is_err());
    }

    #[test]
    fn quadrature_cases() {
        let g = Grid1D::new(16.0, 256).unwrap();
        let q = g.quadrature(&g.sample(gamma_sq)).unwrap();
        assert!((q - PI.sqrt()).abs() < 1e-12);
        assert!((g.quadrature(&vec![1.0; 256]).unwrap() - 32.0).abs() < 1e-12);
        assert!(g.quadrature(&g.sample(|x| x * gamma_sq(x))).unwrap().abs() < 1e-12);
        let mut bad = vec![0.0; 256];
        bad[3] = f64::NAN;
        assert!(g.quadrature(&bad).is_err());
    }

    #[test]
    fn derivative_cases() {
        let g = Grid1D::new(PI, 64).unwrap();
        let k = 3.0;
        let f = g.sample_complex(|x| Complex64::new((k * x).sin(), 0.0));
        let d = g.spectral_derivative(&f, 1).unwrap();
        for (j, c) in d.iter().enumerate() {
            assert!((c.re - k * (k * g.x(j)).cos()).abs() < 1e-10);
        }
        let c = vec![Complex64::new(2.5, -1.0); 64];
        for order in 1..4 {
            assert!(g.spectral_derivative(&c, order).unwrap().iter().all(|v| v.norm() < 1e-12));
        }
        let wide = Grid1D::new(20.0, 512).unwrap();
        let d2 = wide.spectral_derivative_real(&wide.sample(gamma), 2).unwrap();
        for (j, v) in d2.iter().enumerate() {
            let x = wide.x(j);
            assert!((v - (x * x - 1.0) * gamma(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn primitive_of_gaussian() {
        let g = Grid1D::new(12.0, 256).unwrap();
        let f = g.primitive(&g.sample(gamma_sq)).unwrap();
        for (j, v) in f.iter().enumerate() {
            let exact = 0.5 * PI.sqrt() * (1.0 + libm::erf(g.x(j)));
            assert!((v - exact).abs() < 1e-12, "{j}: {v} vs {exact}");
        }
    }

    #[test]
    fn interpolant_matches_function() {
        let g = Grid1D::new(12.0, 256).unwrap();
        let p = TrigInterpolant::from_real(&g, &g.sample(|x| gamma_sq(x - 0.3))).unwrap();
        for &x in &[-3.21, -0.017, 0.5, 1.234567, 4.0] {
            let (v, d, prim) = p.eval_full(x);
            assert!((v.re - gamma_sq(x - 0.3)).abs() < 1e-13);
            assert!((d.re + 2.0 * (x - 0.3) * gamma_sq(x - 0.3)).abs() < 1e-12);
            let exact = 0.5 * PI.sqrt() * (1.0 + libm::erf(x - 0.3));
            assert!((prim.re - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn density_moments() {
        let g = Grid1D::new(16.0, 256).unwrap();
        let d = Density::from_fn(&g, |x| normal_pdf(x, 0.5, 2.0)).unwrap();
        assert!((d.mass() - 1.0).abs() < 1e-12);
        assert!((d.mean().unwrap() - 0.5).abs() < 1e-12);
        assert!((d.variance().unwrap() - 2.0).abs() < 1e-12);
        let zero = Density::new(&g, vec![0.0; 256]).unwrap();
        assert!(zero.mean().is_err());
        assert!(Density::new(&g, vec![-1.0; 256]).is_err());
    }
}
