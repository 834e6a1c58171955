//! End-to-end acceptance criteria. Each prints one PASS/FAIL line; the test fails if any does.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use logdisp::fokker_planck::{
    equilibrium, fp_apply, fp_decay_certificate, fp_from_heat_check, w1_decay_in_s, w2_contraction_check,
};
use logdisp::grid::{normal_pdf, Density, Grid1D};
use logdisp::lognls::{
    conserved_quantities_with, gaussian_ansatz_oracle, moment_identities, GaussianWkb, RescaledSolver, StrangSolver,
    DEFAULT_VACUUM_FACTOR,
};
use logdisp::metrics::{csiszar_kullback_gap, neg_sobolev_w11, wasserstein_1d};
use logdisp::scaling::solve_tau;
use logdisp::wigner::{husimi_moments, husimi_transform, wigner_transform};
use logdisp::Result;
use logdisp_cli::config::LoadedConfig;
use logdisp_cli::scenarios::{self, Outcome};
use logdisp_cli::selftest::random_pairs;

struct Verdict {
    pass: bool,
    detail: String,
}

fn report(number: usize, name: &str, verdict: Result<Verdict>) -> bool {
    let (pass, detail) = match verdict {
        Ok(v) => (v.pass, v.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let _ = writeln!(
        std::io::stderr(),
        "criterion {number:>2} {}: {name} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, Duration)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed()))
}

fn scenario(name: &str) -> Result<Outcome> {
    let loaded = LoadedConfig::from_str(&format!("scenario = \"{name}\"\n")).expect("default config");
    scenarios::run(&loaded.config)
}

fn from_scenario(outcome: Outcome) -> Verdict {
    let detail = outcome.checks.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect::<Vec<_>>().join("; ");
    Verdict { pass: outcome.passed(), detail }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn strang_run(dt: f64, steps: usize) -> Result<(f64, f64)> {
    let grid = Grid1D::new(16.0, 512)?;
    let solver = StrangSolver::new(&grid, 0.5, 1.0, dt)?;
    let mut u = GaussianWkb::GAMMA.field(&grid, 0.5)?;
    let q0 = conserved_quantities_with(&u, 1.0, DEFAULT_VACUUM_FACTOR)?;
    solver.advance(&mut u, steps)?;
    let q1 = conserved_quantities_with(&u, 1.0, DEFAULT_VACUUM_FACTOR)?;
    Ok(((q1.mass - q0.mass).abs() / q0.mass, (q1.energy - q0.energy).abs()))
}

fn conservation() -> Result<Verdict> {
    let ((mass, energy), elapsed) = timed(|| strang_run(1e-3, 10_000))?;
    let (_, energy_half) = strang_run(5e-4, 20_000)?;
    let ratio = energy / energy_half;
    Ok(Verdict {
        pass: mass <= 1e-11 && energy <= 1e-5 && (3.5..=4.5).contains(&ratio) && elapsed < Duration::from_secs(10),
        detail: format!(
            "mass {mass:.3e}, energy {energy:.3e}, halving ratio {ratio:.3}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    })
}

fn oracle_equivalence() -> Result<Verdict> {
    let grid = Grid1D::new(16.0, 512)?;
    let wkb = GaussianWkb::GAMMA;
    let exact = gaussian_ansatz_oracle(wkb, 0.5, 1.0, 1.0, &grid)?;
    let error = |dt: f64| -> Result<f64> {
        let solver = StrangSolver::new(&grid, 0.5, 1.0, dt)?;
        let mut u = wkb.field(&grid, 0.5)?;
        solver.advance(&mut u, (1.0 / dt).round() as usize)?;
        u.l2_distance(&exact)
    };
    let fine = error(1e-4)?;
    let levels = [error(1e-3)?, error(5e-4)?, error(2.5e-4)?];
    let ratios = [levels[0] / levels[1], levels[1] / levels[2]];
    Ok(Verdict {
        pass: fine <= 1e-6 && ratios.iter().all(|r| (3.5..=4.5).contains(r)),
        detail: format!("L2 error {fine:.3e} at dt = 1e-4, ratios {ratios:.3?}"),
    })
}

fn husimi_identities() -> Result<Verdict> {
    let ((worst, count), elapsed) = timed(|| {
        let grid = Grid1D::new(16.0, 512)?;
        let wkb = GaussianWkb { rho_star: 1.0, sigma0: 1.0, omega0: 0.5, p0: 1.0 };
        let u = gaussian_ansatz_oracle(wkb, 0.5, 1.0, 1.0, &grid)?;
        let m = husimi_moments(&husimi_transform(&wigner_transform(&u)?)?, &u)?;
        Ok((m.max_discrepancy(), m.identities.len()))
    })?;
    Ok(Verdict {
        pass: worst <= 1e-6 && elapsed < Duration::from_secs(30),
        detail: format!("{count} identities, worst relative discrepancy {worst:.3e}, {:.2} s", elapsed.as_secs_f64()),
    })
}

fn affine_second_moment() -> Result<Verdict> {
    let grid = Grid1D::new(16.0, 512)?;
    let traj = solve_tau(1.0, 20.0, 1e-3)?;
    let solver = RescaledSolver::new(&grid, 0.5, &traj, 1e-2)?;
    let wkb = GaussianWkb { rho_star: 1.0, sigma0: 1.0, omega0: 0.0, p0: 1.0 };
    let mut v = wkb.field(&grid, 0.5)?;
    let mut trace = vec![(0.0, v.density())];
    for k in 1..=40 {
        solver.advance_to(&mut v, 0.5 * k as f64)?;
        trace.push((v.time(), v.density()));
    }
    let d = moment_identities(&trace, &traj)?;
    let rel = d.max_second_difference() / d.scale;
    Ok(Verdict { pass: rel <= 1e-6, detail: format!("max second difference {rel:.3e} of scale over t in [0, 20]") })
}

fn fokker_planck_semigroup() -> Result<Verdict> {
    let ((stationary, semigroup, heat, w2), elapsed) = timed(|| {
        let grid = Grid1D::new(8.0, 256)?;
        let eq = equilibrium(&grid)?;
        let f0 = grid.sample(|y| 0.7 * normal_pdf(y, 1.0, 0.3) + 0.3 * normal_pdf(y, -0.5, 0.8));
        let mut stationary = 0.0_f64;
        let mut heat = 0.0_f64;
        for t in [0.05, 0.5, 2.0, 5.0] {
            stationary = stationary.max(max_abs_diff(&fp_apply(t, &grid, eq.values())?, eq.values()));
            heat = heat.max(fp_from_heat_check(&grid, &f0, t)?);
        }
        let mut semigroup = 0.0_f64;
        for (s, t) in [(0.3, 0.7), (0.01, 0.5), (1.0, 2.0)] {
            let a = fp_apply(s + t, &grid, &f0)?;
            let b = fp_apply(s, &grid, &fp_apply(t, &grid, &f0)?)?;
            semigroup = semigroup.max(max_abs_diff(&a, &b));
        }
        let rho = Density::new(&grid, grid.sample(|y| normal_pdf(y, 1.0, 0.5)))?;
        let w2 = w2_contraction_check(&rho, &[0.1, 0.5, 1.0, 2.0])?
            .iter()
            .map(|r| (r.factor - (-2.0 * r.t).exp()).abs())
            .fold(0.0, f64::max);
        Ok((stationary, semigroup, heat, w2))
    })?;
    Ok(Verdict {
        pass: stationary <= 1e-10
            && semigroup <= 1e-8
            && heat <= 1e-8
            && w2 <= 1e-6
            && elapsed < Duration::from_secs(20),
        detail: format!(
            "stationary {stationary:.3e}, semigroup {semigroup:.3e}, heat {heat:.3e}, W2 factor {w2:.3e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    })
}

fn source_decay() -> Result<Verdict> {
    let grid = Grid1D::new(8.0, 256)?;
    let g = grid.clone();
    let source = move |u: f64| g.sample(|x| (-u).exp() * (x - 0.3) * (-(x - 0.3) * (x - 0.3) / 0.5).exp());
    let mut pass = true;
    let mut least = f64::INFINITY;
    for n in [1, 2] {
        for r in fp_decay_certificate(&grid, &source, n, &[0.5, 1.0, 2.0], 32)? {
            pass &= r.passes();
            least = least.min(r.headroom_a()).min(r.headroom_b());
        }
    }
    Ok(Verdict { pass, detail: format!("6 rows, smallest headroom {least:.3} (need 0.05)") })
}

fn wasserstein_rate() -> Result<Verdict> {
    let nls = from_scenario(scenario("convergence_rate")?);
    let grid = Grid1D::new(8.0, 256)?;
    let rho = Density::from_fn(&grid, |y| 0.7 * normal_pdf(y, 1.0, 0.3) + 0.3 * normal_pdf(y, -0.5, 0.8))?;
    let s: Vec<f64> = (0..=9).map(|k| 0.2 + 0.2 * k as f64).collect();
    let ratios: Vec<f64> = w1_decay_in_s(&rho, &s)?.iter().map(|r| r.factor / (-2.0 * r.t).exp()).collect();
    let fp = ratios.iter().all(|r| (0.5..=2.0).contains(r));
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), &r| (a.min(r), b.max(r)));
    Ok(Verdict {
        pass: nls.pass && fp,
        detail: format!("{}; FP W1(s) e^(2s) / W1(0) in [{lo:.4}, {hi:.4}] for s in [0.2, 2]", nls.detail),
    })
}

fn kie_gaussian() -> Result<Verdict> {
    let (outcome, elapsed) = timed(|| scenario("kie_gaussian"))?;
    let mut v = from_scenario(outcome);
    v.pass &= elapsed < Duration::from_secs(10);
    v.detail.push_str(&format!("; {:.2} s", elapsed.as_secs_f64()));
    Ok(v)
}

fn metrics() -> Result<Verdict> {
    let grid = Grid1D::new(10.0, 512)?;
    let pairs = random_pairs(&grid, 100, 2024)?;
    let reference = Density::from_fn(&grid, |y| (-y * y).exp())?;
    let mut kr = 0.0_f64;
    let mut ck_violations = 0;
    let mut order_violations = 0;
    for (a, b) in &pairs {
        let diff: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
        let w1 = wasserstein_1d(1.0, a, b)?;
        kr = kr.max((neg_sobolev_w11(&diff, &grid)? - w1).abs());
        if w1 > wasserstein_1d(2.0, a, b)? * (1.0 + 1e-12) {
            order_violations += 1;
        }
        for rho in [a, b] {
            let (lhs, rhs) = csiszar_kullback_gap(&rho.scaled(PI.sqrt())?, &reference)?;
            if lhs < rhs {
                ck_violations += 1;
            }
        }
    }
    Ok(Verdict {
        pass: kr <= 1e-10 && ck_violations == 0 && order_violations == 0,
        detail: format!(
            "KR {kr:.3e} over 100 pairs, CK violations {ck_violations}/200, W1 > W2 on {order_violations} pairs"
        ),
    })
}

#[test]
fn acceptance_criteria() {
    let results = [
        report(1, "Strang conservation", conservation()),
        report(2, "oracle equivalence", oracle_equivalence()),
        report(3, "Husimi moment identities", husimi_identities()),
        report(4, "affine rescaled second moment", affine_second_moment()),
        report(5, "Fokker-Planck semigroup", fokker_planck_semigroup()),
        report(6, "Fokker-Planck source decay", source_decay()),
        report(7, "Wasserstein rate", wasserstein_rate()),
        report(8, "semiclassical limit", scenario("semiclassical_sweep").map(from_scenario)),
        report(9, "KIE Gaussian-Gaussian", kie_gaussian()),
        report(10, "Sobolev growth", scenario("sobolev_growth").map(from_scenario)),
        report(11, "metric identities", metrics()),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, p)| !**p).map(|(k, _)| k + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
