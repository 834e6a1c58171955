use logdisp::grid::Grid1D;
use logdisp::kie::{c1c2_product_deviation, solve_c1, GaussianGaussianParams};
use logdisp::lognls::{GaussianWkb, StrangSolver};
use logdisp::scaling::{solve_tau, tau_asymptotic};
use proptest::prelude::*;

#[test]
fn tau_follows_its_asymptotic_law() {
    let traj = solve_tau(1.0, 1e4, 1e-2).unwrap();
    let (lead, _) = tau_asymptotic(1.0, 1e4).unwrap();
    let ratio = traj.tau(1e4).unwrap() / lead;
    assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tau_is_increasing_and_conserves_its_first_integral(lambda in 0.2..3.0f64) {
        let traj = solve_tau(lambda, 20.0, 1e-3).unwrap();
        prop_assert!(traj.first_integral_drift() <= 1e-8);
        let taus: Vec<f64> = traj.samples().map(|(_, tau, _)| tau).collect();
        prop_assert!(taus.windows(2).all(|w| w[1] >= w[0]) && taus[0] == 1.0);
    }

    #[test]
    fn kie_product_and_first_integral(
        lambda in 0.2..2.0f64,
        c10 in 0.5..2.0f64,
        c20 in 0.1..2.0f64,
        c11 in -1.0..1.0f64,
    ) {
        let p = GaussianGaussianParams::new(lambda, c10, c20, c11, 0.0, 0.0).unwrap();
        let traj = solve_c1(p, 10.0, 1e-3).unwrap();
        prop_assert!(traj.first_integral_drift() <= 1e-8);
        prop_assert!(c1c2_product_deviation(p, 10.0, 1e-3).unwrap() <= 1e-10);
        let floor = p.c1_minimum();
        let lowest = (0..=10_000).map(|k| traj.c1(k as f64 * 1e-3).unwrap()).fold(f64::INFINITY, f64::min);
        prop_assert!(lowest >= floor * (1.0 - 1e-9) && lowest <= floor * (1.0 + 1e-5), "{lowest} vs {floor}");
    }

    #[test]
    fn strang_conserves_mass(sigma0 in 0.5..2.0f64, omega0 in -0.5..0.5f64, p0 in -1.0..1.0f64) {
        let grid = Grid1D::new(16.0, 256).unwrap();
        let wkb = GaussianWkb { rho_star: 1.0, sigma0, omega0, p0 };
        let solver = StrangSolver::new(&grid, 0.5, 1.0, 1e-3).unwrap();
        let mut u = wkb.field(&grid, 0.5).unwrap();
        let m0 = u.mass_sq();
        solver.advance(&mut u, 200).unwrap();
        prop_assert!((u.mass_sq() - m0).abs() <= 1e-12 * m0);
    }
}
