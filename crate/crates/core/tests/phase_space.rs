use logdisp::fokker_planck::fp_apply;
use logdisp::grid::{normal_pdf, Grid1D};
use logdisp::lognls::{GaussianWkb, WaveField};
use logdisp::wigner::wigner_transform;
use num_complex::Complex64;
use proptest::prelude::*;

fn wkb() -> impl Strategy<Value = GaussianWkb> {
    (0.5..2.0, 0.5..2.0, -1.0..1.0, -1.0..1.0)
        .prop_map(|(rho_star, sigma0, omega0, p0)| GaussianWkb { rho_star, sigma0, omega0, p0 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn wigner_is_quadratic_and_phase_blind(w in wkb(), re in -2.0..2.0f64, im in -2.0..2.0f64) {
        prop_assume!(re.hypot(im) > 0.1);
        let grid = Grid1D::new(12.0, 128).unwrap();
        let u = w.field(&grid, 0.7).unwrap();
        let c = Complex64::new(re, im);
        let cu = WaveField::new(&grid, 0.7, u.values().iter().map(|v| v * c).collect(), 0.0).unwrap();
        let a = wigner_transform(&u).unwrap();
        let b = wigner_transform(&cu).unwrap();
        let scale = c.norm_sqr();
        let peak = a.min_max().1.abs().max(a.min_max().0.abs());
        let err = a.values().iter().zip(b.values()).map(|(x, y)| (scale * x - y).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12 * scale * peak.max(1.0));
        prop_assert!(a.imag_residue() <= 1e-12);
    }

    #[test]
    fn fokker_planck_preserves_mass_and_sign(m in -2.0..2.0f64, v in 0.1..1.0f64, t in 0.01..4.0f64) {
        let grid = Grid1D::new(8.0, 256).unwrap();
        let f0 = grid.sample(|y| normal_pdf(y, m, v));
        let f = fp_apply(t, &grid, &f0).unwrap();
        let mass = |g: &[f64]| grid.quadrature(g).unwrap();
        prop_assert!((mass(&f) - mass(&f0)).abs() <= 1e-9);
        prop_assert!(f.iter().all(|&x| x >= -1e-12));
    }

    #[test]
    fn fokker_planck_semigroup(s in 0.01..2.0f64, t in 0.01..2.0f64) {
        let grid = Grid1D::new(8.0, 256).unwrap();
        let f0 = grid.sample(|y| 0.6 * normal_pdf(y, 1.0, 0.2) + 0.4 * normal_pdf(y, -1.0, 0.5));
        let a = fp_apply(s + t, &grid, &f0).unwrap();
        let b = fp_apply(s, &grid, &fp_apply(t, &grid, &f0).unwrap()).unwrap();
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-8, "{err}");
    }
}
