//! Classical fourth-order Runge-Kutta on small fixed-size real systems.

pub(crate) fn rk4_step<const K: usize, F>(f: &F, t: f64, y: [f64; K], h: f64) -> [f64; K]
where
    F: Fn(f64, &[f64; K]) -> [f64; K],
{
    let axpy = |a: &[f64; K], s: f64, b: &[f64; K]| {
        let mut out = *a;
        for i in 0..K {
            out[i] += s * b[i];
        }
        out
    };
    let k1 = f(t, &y);
    let k2 = f(t + 0.5 * h, &axpy(&y, 0.5 * h, &k1));
    let k3 = f(t + 0.5 * h, &axpy(&y, 0.5 * h, &k2));
    let k4 = f(t + h, &axpy(&y, h, &k3));
    let mut out = y;
    for i in 0..K {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Quintic Hermite interpolation on `[0, h]` from value, first and second derivative at both ends.
/// Returns the value and first derivative at offset `s`.
pub(crate) fn quintic_hermite(h: f64, s: f64, left: [f64; 3], right: [f64; 3]) -> (f64, f64) {
    let u = s / h;
    let (y0, d0, a0) = (left[0], left[1] * h, left[2] * h * h);
    let (y1, d1, a1) = (right[0], right[1] * h, right[2] * h * h);
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u3 * u;
    let u5 = u4 * u;
    let h00 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
    let h10 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
    let h20 = 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5);
    let h01 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
    let h11 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
    let h21 = 0.5 * (u3 - 2.0 * u4 + u5);
    let dh00 = -30.0 * u2 + 60.0 * u3 - 30.0 * u4;
    let dh10 = 1.0 - 18.0 * u2 + 32.0 * u3 - 15.0 * u4;
    let dh20 = 0.5 * (2.0 * u - 9.0 * u2 + 12.0 * u3 - 5.0 * u4);
    let dh01 = 30.0 * u2 - 60.0 * u3 + 30.0 * u4;
    let dh11 = -12.0 * u2 + 28.0 * u3 - 15.0 * u4;
    let dh21 = 0.5 * (3.0 * u2 - 8.0 * u3 + 5.0 * u4);
    let value = h00 * y0 + h10 * d0 + h20 * a0 + h01 * y1 + h11 * d1 + h21 * a1;
    let slope = (dh00 * y0 + dh10 * d0 + dh20 * a0 + dh01 * y1 + dh11 * d1 + dh21 * a1) / h;
    (value, slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_exponential() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let mut y = [1.0];
        for k in 0..100 {
            y = rk4_step(&f, k as f64 * 0.01, y, 0.01);
        }
        assert!((y[0] - 1f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn hermite_reproduces_quintics() {
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) + 0.25 * x.powi(5);
        let dp = |x: f64| -2.0 + 1.5 * x * x + 1.25 * x.powi(4);
        let ddp = |x: f64| 3.0 * x + 5.0 * x.powi(3);
        let (a, b) = (0.3, 1.1);
        let (v, d) = quintic_hermite(b - a, 0.37, [p(a), dp(a), ddp(a)], [p(b), dp(b), ddp(b)]);
        assert!((v - p(a + 0.37)).abs() < 1e-13);
        assert!((d - dp(a + 0.37)).abs() < 1e-12);
    }
}
