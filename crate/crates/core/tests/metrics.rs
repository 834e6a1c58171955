use std::f64::consts::PI;

use logdisp::grid::{normal_pdf, Density, Grid1D};
use logdisp::metrics::{csiszar_kullback_gap, neg_sobolev_w11, wasserstein_1d};
use proptest::prelude::*;

fn mixture(grid: &Grid1D, (w, m1, v1, m2, v2): (f64, f64, f64, f64, f64)) -> Density {
    Density::from_fn(grid, |x| w * normal_pdf(x, m1, v1) + (1.0 - w) * normal_pdf(x, m2, v2)).unwrap()
}

fn params() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
    (0.05..0.95, -2.5..2.5, 0.05..1.5, -2.5..2.5, 0.05..1.5)
}

fn grid() -> Grid1D {
    Grid1D::new(16.0, 1024).unwrap()
}

#[test]
fn w1_of_translated_gaussians_is_the_shift() {
    let g = grid();
    let a = Density::from_fn(&g, |x| normal_pdf(x, -0.4, 0.3)).unwrap();
    let b = Density::from_fn(&g, |x| normal_pdf(x, 0.85, 0.3)).unwrap();
    assert!((wasserstein_1d(1.0, &a, &b).unwrap() - 1.25).abs() < 1e-8);
    assert!((wasserstein_1d(2.0, &a, &b).unwrap() - 1.25).abs() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kantorovich_rubinstein_identity(p in params(), q in params()) {
        let g = grid();
        let (a, b) = (mixture(&g, p), mixture(&g, q));
        let diff: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
        let w1 = wasserstein_1d(1.0, &a, &b).unwrap();
        prop_assert!((neg_sobolev_w11(&diff, &g).unwrap() - w1).abs() <= 1e-10);
    }

    #[test]
    fn w1_is_below_w2_and_symmetric(p in params(), q in params()) {
        let g = grid();
        let (a, b) = (mixture(&g, p), mixture(&g, q));
        let w1 = wasserstein_1d(1.0, &a, &b).unwrap();
        prop_assert!(w1 <= wasserstein_1d(2.0, &a, &b).unwrap() * (1.0 + 1e-12));
        prop_assert!((w1 - wasserstein_1d(1.0, &b, &a).unwrap()).abs() <= 1e-12);
        prop_assert!(wasserstein_1d(1.0, &a, &a).unwrap() <= 1e-12);
    }

    #[test]
    fn csiszar_kullback_holds(p in params()) {
        let g = grid();
        let rho = mixture(&g, p).scaled(PI.sqrt()).unwrap();
        let reference = Density::from_fn(&g, |y| (-y * y).exp()).unwrap();
        let (lhs, rhs) = csiszar_kullback_gap(&rho, &reference).unwrap();
        prop_assert!(lhs >= rhs, "{lhs} < {rhs}");
    }
}
