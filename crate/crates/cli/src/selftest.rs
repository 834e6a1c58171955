//! Invariant suite behind `logdisp self-test`.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use logdisp::fokker_planck::{
    derivative_commutation_residual, equilibrium, fp_apply, fp_decay_certificate, fp_duhamel,
    fp_duhamel_time_derivative, fp_from_heat_check, w1_decay_in_s, w2_contraction_check, FpKernelEval,
};
use logdisp::grid::{gamma, normal_pdf, Density, Grid1D};
use logdisp::kie::{
    c1c2_product_deviation, default_step, kie_conservation_report, monokinetic_family, solve_c1, vlasov_refinement, GaussianGaussianParams,
    PhaseLattice, TensorProduct,
};
use logdisp::lognls::{
    conserved_quantities_with, gaussian_ansatz_oracle, modified_energy_report, moment_identities, sobolev_growth,
    GaussianAnsatz, GaussianWkb, RescaledSolver, StrangSolver, WaveField,
};
use logdisp::metrics::{csiszar_kullback_gap, neg_sobolev_w11, wasserstein_1d};
use logdisp::scaling::{solve_tau, solve_tau0};
use logdisp::wigner::{husimi_moments, husimi_transform, monokinetic_gap, wigner_transform, TestFunction};
use logdisp::Result;

use crate::config::{Config, LoadedConfig};
use crate::output::sci_list;
use crate::scenarios::{self, Check};

type Verdict = Result<(bool, String)>;

struct Invariant {
    module: &'static str,
    name: &'static str,
    run: fn(&Context) -> Verdict,
}

/// Knobs shared by the invariants.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    /// Factor of `delta_vac = factor * max|u|^2` used wherever `ln|u|^2` is evaluated.
    pub vacuum_factor: f64,
}

impl Default for Context {
    fn default() -> Self {
        Self { vacuum_factor: logdisp::lognls::DEFAULT_VACUUM_FACTOR }
    }
}

#[derive(Debug, Clone)]
pub struct SelfTestReport {
    pub checks: Vec<Check>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Ok((pass, detail))
}

const INVARIANTS: &[Invariant] = &[
    Invariant { module: "grid", name: "spectral derivative of gamma", run: grid_derivative },
    Invariant { module: "grid", name: "L1 norm of a signed profile", run: grid_l1 },
    Invariant { module: "scaling", name: "tau first integral", run: scaling_first_integral },
    Invariant { module: "scaling", name: "s-t round trip", run: scaling_roundtrip },
    Invariant { module: "lognls", name: "mass conservation", run: nls_mass },
    Invariant { module: "lognls", name: "entropy of gamma", run: nls_entropy },
    Invariant { module: "lognls", name: "energy drift order 2", run: nls_energy_order },
    Invariant { module: "lognls", name: "solver matches Gaussian oracle", run: nls_oracle },
    Invariant { module: "lognls", name: "rescaled run stays Gaussian", run: nls_rescaled_entropy },
    Invariant { module: "lognls", name: "first moment affine", run: nls_moments },
    Invariant { module: "lognls", name: "Sobolev growth ratio", run: nls_sobolev },
    Invariant { module: "wigner", name: "Husimi moment identities", run: wigner_identities },
    Invariant { module: "wigner", name: "monokinetic gap decreasing", run: wigner_gap },
    Invariant { module: "fokker_planck", name: "equilibrium stationary", run: fp_stationary },
    Invariant { module: "fokker_planck", name: "columns integrate to one", run: fp_columns },
    Invariant { module: "fokker_planck", name: "semigroup property", run: fp_semigroup },
    Invariant { module: "fokker_planck", name: "heat-equation route", run: fp_heat },
    Invariant { module: "fokker_planck", name: "derivative commutation", run: fp_commutation },
    Invariant { module: "fokker_planck", name: "W2 contraction", run: fp_w2 },
    Invariant { module: "fokker_planck", name: "W1 decay in s", run: fp_w1 },
    Invariant { module: "fokker_planck", name: "source decay certificate", run: fp_certificate },
    Invariant { module: "fokker_planck", name: "time-derivative source", run: fp_time_derivative },
    Invariant { module: "metrics", name: "Kantorovich-Rubinstein identity", run: metrics_kr },
    Invariant { module: "metrics", name: "Csiszar-Kullback inequality", run: metrics_ck },
    Invariant { module: "metrics", name: "W1 <= W2", run: metrics_order },
    Invariant { module: "kie", name: "c1 c2 constant", run: kie_product },
    Invariant { module: "kie", name: "Vlasov residual order 2", run: kie_vlasov },
    Invariant { module: "kie", name: "energy conservation", run: kie_energy },
    Invariant { module: "kie", name: "tensor product order 2", run: kie_tensor },
    Invariant { module: "kie", name: "isothermal Euler order 2", run: kie_euler },
    Invariant { module: "kie", name: "c1 ~ 2t sqrt(lambda ln t)", run: kie_asymptotic },
    Invariant { module: "cli", name: "deterministic CSV", run: cli_determinism },
];

/// Runs every invariant, printing one line each when `verbose`.
pub fn run(ctx: &Context, verbose: bool) -> SelfTestReport {
    let mut checks = Vec::with_capacity(INVARIANTS.len());
    for inv in INVARIANTS {
        let start = Instant::now();
        let (pass, detail) = match (inv.run)(ctx) {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let name = format!("{}: {}", inv.module, inv.name);
        if verbose {
            println!(
                "{} {name} ({detail}) [{:.2} s]",
                if pass { "PASS" } else { "FAIL" },
                start.elapsed().as_secs_f64()
            );
        }
        checks.push(Check { name, pass, detail });
    }
    SelfTestReport { checks }
}

fn grid_derivative(_: &Context) -> Verdict {
    let grid = Grid1D::new(16.0, 256)?;
    let d = grid.spectral_derivative_real(&grid.sample(gamma), 1)?;
    let err = max_abs_diff(&d, &grid.sample(|x| -x * gamma(x)));
    verdict(err < 1e-12, format!("max error {err:.3e}"))
}

fn grid_l1(_: &Context) -> Verdict {
    let grid = Grid1D::new(10.0, 256)?;
    let l1 = grid.l1_norm(&grid.sample(|x| (x - 0.3) * (-(x - 0.3) * (x - 0.3)).exp()))?;
    verdict((l1 - 1.0).abs() < 1e-12, format!("|L1 - 1| = {:.3e}", (l1 - 1.0).abs()))
}

fn scaling_first_integral(_: &Context) -> Verdict {
    let traj = solve_tau(1.0, 100.0, 1e-3)?;
    let drift = traj.first_integral_drift();
    verdict(drift <= 1e-8, format!("drift {drift:.3e}"))
}

fn scaling_roundtrip(_: &Context) -> Verdict {
    let traj = solve_tau(1.0, 50.0, 1e-3)?;
    let err = [0.5, 3.0, 20.0]
        .iter()
        .map(|&t| Ok((traj.t_of_s(traj.s_of_t(t)?)? - t).abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    verdict(err <= 1e-8, format!("max error {err:.3e}"))
}

fn nls_grid() -> Result<Grid1D> {
    Grid1D::new(16.0, 512)
}

fn nls_mass(ctx: &Context) -> Verdict {
    let grid = nls_grid()?;
    let solver = StrangSolver::with_vacuum_factor(&grid, 0.5, 1.0, 1e-3, ctx.vacuum_factor)?;
    let mut u = GaussianWkb::GAMMA.field(&grid, 0.5)?;
    let m0 = u.mass();
    solver.advance(&mut u, 2000)?;
    let rel = (u.mass() - m0).abs() / m0;
    verdict(rel <= 1e-11, format!("relative drift {rel:.3e}"))
}

fn nls_entropy(ctx: &Context) -> Verdict {
    let grid = nls_grid()?;
    let u = WaveField::from_fn(&grid, 0.5, |x| gamma(x).into())?;
    let e = conserved_quantities_with(&u, 1.0, ctx.vacuum_factor)?;
    let err = (e.entropy + 0.5 * PI.sqrt()).abs();
    verdict(err <= 1e-10, format!("int gamma^2 ln gamma^2 off by {err:.3e}"))
}

fn energy_drift(ctx: &Context, dt: f64) -> Result<f64> {
    let grid = nls_grid()?;
    let solver = StrangSolver::with_vacuum_factor(&grid, 0.5, 1.0, dt, ctx.vacuum_factor)?;
    let mut u = GaussianWkb::GAMMA.field(&grid, 0.5)?;
    let e0 = conserved_quantities_with(&u, 1.0, ctx.vacuum_factor)?.energy;
    solver.advance(&mut u, (2.0 / dt).round() as usize)?;
    Ok((conserved_quantities_with(&u, 1.0, ctx.vacuum_factor)?.energy - e0).abs())
}

fn nls_energy_order(ctx: &Context) -> Verdict {
    let a = energy_drift(ctx, 2e-3)?;
    let b = energy_drift(ctx, 1e-3)?;
    let ratio = a / b;
    verdict((3.5..=4.5).contains(&ratio) && b <= 1e-5, format!("drift {b:.3e}, ratio {ratio:.3}"))
}

fn nls_oracle(ctx: &Context) -> Verdict {
    let grid = nls_grid()?;
    let solver = StrangSolver::with_vacuum_factor(&grid, 0.5, 1.0, 1e-3, ctx.vacuum_factor)?;
    let mut u = GaussianWkb::GAMMA.field(&grid, 0.5)?;
    solver.advance(&mut u, 1000)?;
    let exact = gaussian_ansatz_oracle(GaussianWkb::GAMMA, 0.5, 1.0, 1.0, &grid)?;
    let err = u.l2_distance(&exact)?;
    verdict(err <= 1e-6, format!("L2 error {err:.3e} at t = 1"))
}

fn rescaled_variance_error(ctx: &Context, dt: f64) -> Result<(f64, f64, f64)> {
    let grid = nls_grid()?;
    let traj = solve_tau(1.0, 5.0, 1e-3)?;
    let solver = RescaledSolver::with_vacuum_factor(&grid, 1.0, &traj, dt, ctx.vacuum_factor)?;
    let mut v = GaussianWkb::GAMMA.field(&grid, 1.0)?;
    solver.advance_to(&mut v, 5.0)?;
    let m = modified_energy_report(&v, &traj, 1.0)?;
    let split = (m.plus - m.minus - m.energy).abs();
    let width = GaussianAnsatz::new(GaussianWkb::GAMMA, 1.0, 1.0)?.state_at(5.0)?.width() / traj.tau(5.0)?;
    let err = (v.density().variance()? - 0.5 * width * width).abs();
    Ok((err, split, m.entropy))
}

fn nls_rescaled_entropy(ctx: &Context) -> Verdict {
    let (coarse, _, _) = rescaled_variance_error(ctx, 1e-2)?;
    let (fine, split, entropy) = rescaled_variance_error(ctx, 5e-3)?;
    let ratio = coarse / fine;
    verdict(
        split <= 1e-10 && entropy >= -1e-12 && fine <= 1e-6 && (3.5..=4.5).contains(&ratio),
        format!("variance error {fine:.3e}, ratio {ratio:.3}, entropy {entropy:.3e}"),
    )
}

fn nls_moments(ctx: &Context) -> Verdict {
    let grid = nls_grid()?;
    let traj = solve_tau(1.0, 10.0, 1e-3)?;
    let solver = RescaledSolver::with_vacuum_factor(&grid, 0.5, &traj, 1e-2, ctx.vacuum_factor)?;
    let wkb = GaussianWkb { rho_star: 1.0, sigma0: 1.0, omega0: 0.0, p0: 1.0 };
    let mut v = wkb.field(&grid, 0.5)?;
    let mut trace = vec![(0.0, v.density())];
    for k in 1..=20 {
        solver.advance_to(&mut v, 0.5 * k as f64)?;
        trace.push((v.time(), v.density()));
    }
    let d = moment_identities(&trace, &traj)?;
    let rel = d.max_second_difference() / d.scale;
    verdict(rel <= 1e-6, format!("second difference {rel:.3e} of scale"))
}

fn nls_sobolev(_: &Context) -> Verdict {
    let ans = GaussianAnsatz::new(GaussianWkb::GAMMA, 0.5, 1.0)?;
    let traj = solve_tau(1.0, 50.0, 1e-3)?;
    let samples: Vec<(f64, f64)> =
        [5.0, 50.0].iter().map(|&t| Ok((t, ans.state_at(t)?.gradient_norm_sq()))).collect::<Result<_>>()?;
    let r = sobolev_growth(&samples, 0.5, 1.0, GaussianWkb::GAMMA.mass_sq(), &traj)?;
    let (a, b) = (r.rows[0].ratio, r.rows[1].ratio);
    verdict((0.7..=1.3).contains(&b) && (b - 1.0).abs() < (a - 1.0).abs(), format!("ratios {a:.4} -> {b:.4}"))
}

fn wigner_identities(_: &Context) -> Verdict {
    let grid = nls_grid()?;
    let wkb = GaussianWkb { rho_star: 1.0, sigma0: 1.0, omega0: 0.5, p0: 1.0 };
    let u = gaussian_ansatz_oracle(wkb, 0.5, 1.0, 1.0, &grid)?;
    let wh = husimi_transform(&wigner_transform(&u)?)?;
    let worst = husimi_moments(&wh, &u)?.max_discrepancy();
    let (lo, hi) = wh.min_max();
    verdict(worst <= 1e-6 && lo >= -1e-6 * hi, format!("worst discrepancy {worst:.3e}, min {lo:.3e}"))
}

fn wigner_gap(_: &Context) -> Verdict {
    let grid = Grid1D::new(16.0, 1024)?;
    let wkb = GaussianWkb { rho_star: 1.0, sigma0: 1.0, omega0: 0.5, p0: 1.0 };
    let fam = monokinetic_family(1.0, 1.0, solve_tau0(1.0, 1.0, 0.5, 1.0, 1e-4)?)?;
    let rho = Density::new(&grid, grid.nodes().iter().map(|&x| fam.rho(1.0, x)).collect::<Result<_>>()?)?;
    let vel: Vec<f64> = grid.nodes().iter().map(|&x| fam.velocity(1.0, x)).collect::<Result<_>>()?;
    let tests = TestFunction::standard_family();
    let gaps = [1.0, 0.5, 0.25]
        .iter()
        .map(|&e| monokinetic_gap(&wigner_transform(&gaussian_ansatz_oracle(wkb, e, 1.0, 1.0, &grid)?)?, &rho, &vel, &tests))
        .collect::<Result<Vec<f64>>>()?;
    verdict(gaps.windows(2).all(|w| w[1] < w[0]), format!("gaps {}", sci_list(&gaps, 3)))
}

fn fp_grid() -> Result<Grid1D> {
    Grid1D::new(8.0, 256)
}

fn fp_datum(grid: &Grid1D) -> Vec<f64> {
    grid.sample(|y| 0.7 * normal_pdf(y, 1.0, 0.3) + 0.3 * normal_pdf(y, -0.5, 0.8))
}

fn fp_stationary(_: &Context) -> Verdict {
    let grid = fp_grid()?;
    let eq = equilibrium(&grid)?;
    let mut worst = 0.0_f64;
    for t in [0.05, 0.5, 2.0, 5.0] {
        worst = worst.max(max_abs_diff(&fp_apply(t, &grid, eq.values())?, eq.values()));
    }
    verdict(worst <= 1e-10, format!("max deviation {worst:.3e}"))
}

fn fp_columns(_: &Context) -> Verdict {
    let grid = fp_grid()?;
    let mut worst = 0.0_f64;
    for t in [0.05, 0.3, 1.0, 5.0] {
        let k = FpKernelEval::new(t, &grid)?;
        if k.min() < 0.0 {
            return verdict(false, format!("negative kernel value at t = {t}"));
        }
        let cols = k.column_integrals();
        for (j, c) in cols.iter().enumerate() {
            if grid.x(j).abs() <= 4.0 {
                worst = worst.max((c - 1.0).abs());
            }
        }
    }
    verdict(worst <= 1e-10, format!("max |column - 1| {worst:.3e} for |y| <= 4"))
}

fn fp_semigroup(_: &Context) -> Verdict {
    let grid = fp_grid()?;
    let f0 = fp_datum(&grid);
    let mut worst = 0.0_f64;
    for (s, t) in [(0.3, 0.7), (0.01, 0.5), (1.0, 2.0)] {
        let a = fp_apply(s + t, &grid, &f0)?;
        let b = fp_apply(s, &grid, &fp_apply(t, &grid, &f0)?)?;
        worst = worst.max(max_abs_diff(&a, &b));
    }
    verdict(worst <= 1e-8, format!("max deviation {worst:.3e}"))
}

fn fp_heat(_: &Context) -> Verdict {
    let grid = fp_grid()?;
    let f0 = fp_datum(&grid);
    let mut worst = 0.0_f64;
    for t in [0.05, 0.5, 3.0] {
        worst = worst.max(fp_from_heat_check(&grid, &f0, t)?);
    }
    verdict(worst <= 1e-8, format!("max relative deviation {worst:.3e}"))
}

fn fp_commutation(_: &Context) -> Verdict {
    let grid = fp_grid()?;
    let f0 = fp_datum(&grid);
    let mut worst = 0.0_f64;
    for n in [1, 2] {
        for t in [0.1, 1.0] {
            worst = worst.max(derivative_commutation_residual(&grid, &f0, n, t)?);
        }
    }
    verdict(worst <= 1e-8, format!("max relative residual {worst:.3e}"))
}

fn fp_w2(_: &Context) -> Verdict {
    let grid = fp_grid()?;
    let rho = Density::new(&grid, grid.sample(|y| normal_pdf(y, 1.0, 0.5)))?;
    let rows = w2_contraction_check(&rho, &[0.1, 0.5, 1.0, 2.0])?;
    let worst = rows.iter().map(|r| (r.factor - (-2.0 * r.t).exp()).abs()).fold(0.0, f64::max);
    verdict(worst <= 1e-6, format!("max |factor - e^(-2t)| {worst:.3e}"))
}

fn fp_w1(_: &Context) -> Verdict {
    let grid = fp_grid()?;
    let rho = Density::new(&grid, fp_datum(&grid))?;
    let rows = w1_decay_in_s(&rho, &[0.2, 0.5, 1.0, 2.0])?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.factor / (-2.0 * r.t).exp()).collect();
    verdict(ratios.iter().all(|r| (0.5..=2.0).contains(r)), format!("W1(s) / (W1(0) e^(-2s)) = {ratios:.4?}"))
}

fn fp_source(grid: &Grid1D) -> impl Fn(f64) -> Vec<f64> + Sync {
    let g = grid.clone();
    move |u: f64| g.sample(|x| (-u).exp() * (x - 0.3) * (-(x - 0.3) * (x - 0.3) / 0.5).exp())
}

fn fp_certificate(_: &Context) -> Verdict {
    let grid = fp_grid()?;
    let h = fp_source(&grid);
    let mut worst = f64::INFINITY;
    let mut pass = true;
    for n in [1, 2] {
        for r in fp_decay_certificate(&grid, &h, n, &[0.5, 1.0, 2.0], 32)? {
            pass &= r.passes();
            worst = worst.min(r.headroom_a()).min(r.headroom_b());
        }
    }
    verdict(pass, format!("smallest headroom {worst:.3}"))
}

fn fp_time_derivative(_: &Context) -> Verdict {
    let grid = fp_grid()?;
    let h = fp_source(&grid);
    let direct = fp_duhamel(&grid, &h, 1, 1.0, 32)?.value;
    let via = fp_duhamel_time_derivative(&grid, &h, 1, 1.0, 32)?;
    let scale = direct.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let err = direct.iter().zip(&via).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max) / scale;
    verdict(err <= 1e-8, format!("relative residual {err:.3e} for h_t = -h"))
}

/// Deterministic random two-component Gaussian mixtures.
pub fn random_pairs(grid: &Grid1D, count: usize, seed: u64) -> Result<Vec<(Density, Density)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Result<Density> {
        let w = rng.gen_range(0.1..0.9);
        let (m1, m2) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (v1, v2) = (rng.gen_range(0.1..1.0), rng.gen_range(0.1..1.0));
        Density::from_fn(grid, |x| w * normal_pdf(x, m1, v1) + (1.0 - w) * normal_pdf(x, m2, v2))
    };
    (0..count).map(|_| Ok((draw(&mut rng)?, draw(&mut rng)?))).collect()
}

fn metrics_kr(_: &Context) -> Verdict {
    let grid = Grid1D::new(10.0, 512)?;
    let mut worst = 0.0_f64;
    for (a, b) in random_pairs(&grid, 100, 7)? {
        let diff: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
        worst = worst.max((neg_sobolev_w11(&diff, &grid)? - wasserstein_1d(1.0, &a, &b)?).abs());
    }
    verdict(worst <= 1e-10, format!("max |W^(-1,1) - W1| {worst:.3e} over 100 pairs"))
}

fn metrics_ck(_: &Context) -> Verdict {
    let grid = Grid1D::new(10.0, 512)?;
    let reference = Density::from_fn(&grid, |y| (-y * y).exp())?;
    let mut violations = 0;
    for (a, _) in random_pairs(&grid, 100, 11)? {
        let rho = a.scaled(PI.sqrt())?;
        let (lhs, rhs) = csiszar_kullback_gap(&rho, &reference)?;
        if lhs < rhs {
            violations += 1;
        }
    }
    verdict(violations == 0, format!("{violations} violations over 100 densities"))
}

fn metrics_order(_: &Context) -> Verdict {
    let grid = Grid1D::new(10.0, 512)?;
    let mut violations = 0;
    for (a, b) in random_pairs(&grid, 100, 13)? {
        if wasserstein_1d(1.0, &a, &b)? > wasserstein_1d(2.0, &a, &b)? * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    verdict(violations == 0, format!("{violations} violations over 100 pairs"))
}

fn kie_params() -> Result<GaussianGaussianParams> {
    GaussianGaussianParams::new(1.0, 1.0, 1.0, 0.3, 0.2, 0.5)
}

fn kie_product(_: &Context) -> Verdict {
    let worst = c1c2_product_deviation(kie_params()?, 20.0, 1e-3)?;
    verdict(worst <= 1e-10, format!("max relative deviation {worst:.3e}"))
}

fn kie_vlasov(_: &Context) -> Verdict {
    let traj = solve_c1(kie_params()?, 3.0, 1e-3)?;
    let lat = PhaseLattice::around(&traj, 1.0, 24)?;
    let r = vlasov_refinement(&traj, 1.0, &lat, default_step(&traj, 1.0)?)?;
    verdict(r.is_order_two(), format!("ratios {:.4?}", r.ratios()))
}

fn kie_energy(_: &Context) -> Verdict {
    let traj = solve_c1(kie_params()?, 10.0, 1e-3)?;
    let rep = kie_conservation_report(&traj, 0.0, 10.0, 20)?;
    verdict(
        rep.energy_drift <= 1e-7 && rep.cross_residual <= 1e-6 && rep.x_second_residual <= 1e-6,
        format!("energy drift {:.3e}", rep.energy_drift),
    )
}

fn kie_tensor(_: &Context) -> Verdict {
    let a = solve_c1(GaussianGaussianParams::new(1.0, 1.0, 0.8, 0.1, 0.0, 0.3)?, 3.0, 1e-3)?;
    let b = solve_c1(GaussianGaussianParams::new(1.0, 0.7, 1.2, -0.2, 0.1, 0.0)?, 3.0, 1e-3)?;
    let tp = TensorProduct::new(&a, &b)?;
    let h = default_step(&a, 1.0)?.min(default_step(&b, 1.0)?);
    let r = tp.refinement(1.0, &PhaseLattice::around(&a, 1.0, 6)?, &PhaseLattice::around(&b, 1.0, 6)?, h)?;
    verdict(r.is_order_two(), format!("ratios {:.4?}", r.ratios()))
}

fn kie_euler(_: &Context) -> Verdict {
    let fam = monokinetic_family(1.0, 0.7, solve_tau0(1.0, 1.0, 0.5, 3.0, 1e-3)?)?;
    let xs: Vec<f64> = (0..41).map(|i| -3.0 + 0.15 * i as f64).collect();
    let (c, m) = fam.euler_refinement(1.0, &xs, 0.05)?;
    verdict(c.is_order_two() && m.is_order_two(), format!("ratios {:.4?} / {:.4?}", c.ratios(), m.ratios()))
}

fn kie_asymptotic(_: &Context) -> Verdict {
    let traj = solve_c1(kie_params()?, 1e4, 1e-2)?;
    let ratios: Vec<f64> = [1e2, 1e3, 1e4]
        .iter()
        .map(|&t: &f64| Ok(traj.c1(t)? / (2.0 * t * t.ln().sqrt())))
        .collect::<Result<_>>()?;
    let trend = ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs());
    verdict(trend, format!("c1 / (2t sqrt(ln t)) = {ratios:.4?}"))
}

fn cli_determinism(_: &Context) -> Verdict {
    let loaded = LoadedConfig::from_str("scenario = \"wigner_moments\"\n")
        .map_err(|e| logdisp::Error::InvalidParameter(e.to_string()))?;
    let once = |c: &Config| -> Result<Vec<u8>> {
        let out = scenarios::run(c)?;
        out.table.to_csv(&loaded.sha256).map_err(|e| logdisp::Error::InvalidParameter(e.to_string()))
    };
    let a = once(&loaded.config)?;
    let b = once(&loaded.config)?;
    verdict(a == b, format!("{} bytes", a.len()))
}
