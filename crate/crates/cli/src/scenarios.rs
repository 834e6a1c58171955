//! The six experiment scenarios.

use std::f64::consts::PI;

use rayon::prelude::*;

use logdisp::fokker_planck::{fp_decay_certificate, CERTIFICATE_HEADROOM};
use logdisp::grid::{gamma_sq, Density, Grid1D};
use logdisp::kie::{
    c1c2_product_deviation, default_step, gg_rescaled_profile, kie_conservation_report, monokinetic_family, solve_c1, vlasov_residual,
    GaussianGaussianParams, PhaseLattice, ORDER_TWO_BAND,
};
use logdisp::lognls::{
    gaussian_ansatz_oracle, sobolev_growth, GaussianAnsatz, GaussianWkb, RescaledSolver, StrangSolver, WaveField,
};
use logdisp::metrics::wasserstein_1d;
use logdisp::scaling::{solve_tau, solve_tau0};
use logdisp::wigner::{husimi_moments, husimi_transform, monokinetic_gap, wigner_transform, TestFunction};
use logdisp::Result;

use crate::config::{self, Config};
use crate::output::{sci_list, Cell, Table};
use crate::plot::{Plot, Series};

/// One named pass/fail verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        Self { name: name.to_string(), pass, detail }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub checks: Vec<Check>,
    pub plot: Option<Plot>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn describe(name: &str) -> &'static str {
    match name {
        "convergence_rate" => "W1 distance of the rescaled density to gamma^2 against 1/sqrt(ln t)",
        "semiclassical_sweep" => "Wigner transform versus the monokinetic limit for decreasing eps",
        "sobolev_growth" => "eps^2 ||u'||^2 against 2 lambda ||u_in||^2 ln tau(t) on exact Gaussians",
        "fp_decay" => "Fokker-Planck source-term decay certificate",
        "kie_gaussian" => "Gaussian-Gaussian kinetic isothermal Euler solutions and their rescaled profile",
        "wigner_moments" => "Husimi moment identities on a Gaussian WKB state",
        _ => "",
    }
}

pub fn run(config: &Config) -> Result<Outcome> {
    match config.scenario.as_str() {
        "convergence_rate" => convergence_rate(&config.convergence_rate),
        "semiclassical_sweep" => semiclassical_sweep(&config.semiclassical_sweep),
        "sobolev_growth" => sobolev(&config.sobolev_growth),
        "fp_decay" => fp_decay(&config.fp_decay),
        "kie_gaussian" => kie_gaussian(&config.kie_gaussian),
        "wigner_moments" => wigner_moments(&config.wigner_moments),
        other => Err(logdisp::Error::InvalidParameter(format!("unknown scenario {other}"))),
    }
}

fn require_sorted(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() || values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(logdisp::Error::InvalidParameter(format!("{what} must be a nonempty increasing list")));
    }
    Ok(())
}

/// `v(0) = (||gamma|| / ||u_in||) u_in`.
fn rescaled_initial(wkb: GaussianWkb, grid: &Grid1D, eps: f64) -> Result<WaveField> {
    let u = wkb.field(grid, eps)?;
    let scale = PI.powf(0.25) / u.mass();
    WaveField::new(grid, eps, u.values().iter().map(|c| c * scale).collect(), 0.0)
}

fn convergence_rate(c: &config::ConvergenceRate) -> Result<Outcome> {
    require_sorted(&c.times, "times")?;
    if c.times[0] <= 1.0 {
        return Err(logdisp::Error::InvalidParameter("times must exceed 1 so that ln t > 0".into()));
    }
    let grid = Grid1D::new(c.half_width, c.n)?;
    let t_max = *c.times.last().expect("nonempty");
    let traj = solve_tau(c.lambda, t_max, c.tau_dt)?;
    let solver = RescaledSolver::with_vacuum_factor(&grid, c.epsilon, &traj, c.dt, c.vacuum_factor)?;
    let mut v = rescaled_initial(c.wkb.into(), &grid, c.epsilon)?;
    let target = Density::from_fn(&grid, |y| gamma_sq(y) / PI.sqrt())?;
    let mut table = Table::new(&["t", "w1", "envelope", "ratio"]);
    let mut ratios = Vec::with_capacity(c.times.len());
    for &t in &c.times {
        solver.advance_to(&mut v, t)?;
        let rho = Density::new(&grid, v.density().values().iter().map(|r| r / PI.sqrt()).collect())?;
        let w1 = wasserstein_1d(1.0, &rho, &target)?;
        let envelope = 1.0 / t.ln().sqrt();
        ratios.push((t, w1 / envelope));
        table.push(vec![t.into(), w1.into(), envelope.into(), (w1 / envelope).into()]);
    }
    let sup = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    let tail: Vec<f64> = ratios.iter().filter(|r| r.0 >= c.monotone_from).map(|r| r.1).collect();
    let monotone = tail.windows(2).all(|w| w[1] <= w[0]);
    let checks = vec![
        Check::new("ratio bounded", sup.is_finite(), format!("sup W1 sqrt(ln t) = {sup:.6e}")),
        Check::new(
            "ratio non-increasing",
            monotone && tail.len() >= 2,
            format!("{} samples from t = {}", tail.len(), c.monotone_from),
        ),
    ];
    let plot = Plot {
        title: "Rescaled density: W1 to gamma^2".into(),
        x_label: "t".into(),
        y_label: "distance".into(),
        log_x: true,
        log_y: true,
        series: vec![
            Series { name: "W1".into(), points: ratios.iter().map(|r| (r.0, r.1 / r.0.ln().sqrt())).collect() },
            Series { name: "1/sqrt(ln t)".into(), points: c.times.iter().map(|&t| (t, 1.0 / t.ln().sqrt())).collect() },
        ],
    };
    Ok(Outcome { table, checks, plot: Some(plot) })
}

fn semiclassical_sweep(c: &config::SemiclassicalSweep) -> Result<Outcome> {
    if c.epsilons.len() < 2 || c.epsilons.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(logdisp::Error::InvalidParameter("epsilons must be a decreasing list of length >= 2".into()));
    }
    let wkb: GaussianWkb = c.wkb.into();
    let grid = Grid1D::new(c.half_width, c.n)?;
    let tau0 = solve_tau0(c.lambda, wkb.sigma0, wkb.omega0, c.t.max(1e-3), 1e-4)?;
    let family = monokinetic_family(wkb.rho_star, wkb.p0, tau0)?;
    let rho = Density::new(&grid, grid.nodes().iter().map(|&x| family.rho(c.t, x)).collect::<Result<_>>()?)?;
    let velocity: Vec<f64> = grid.nodes().iter().map(|&x| family.velocity(c.t, x)).collect::<Result<_>>()?;
    let tests = TestFunction::standard_family();
    let gaps: Vec<f64> = c
        .epsilons
        .par_iter()
        .map(|&eps| {
            let solver = StrangSolver::new(&grid, eps, c.lambda, c.dt)?;
            let mut u = wkb.field(&grid, eps)?;
            solver.advance(&mut u, (c.t / c.dt).round() as usize)?;
            monokinetic_gap(&wigner_transform(&u)?, &rho, &velocity, &tests)
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&["epsilon", "gap", "order"]);
    let mut orders = Vec::new();
    for (k, (&eps, &gap)) in c.epsilons.iter().zip(&gaps).enumerate() {
        let order = if k == 0 { f64::NAN } else { (gaps[k - 1] / gap).ln() / (c.epsilons[k - 1] / eps).ln() };
        if k > 0 {
            orders.push(order);
        }
        table.push(vec![eps.into(), gap.into(), order.into()]);
    }
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    let checks = vec![
        Check::new("gap strictly decreasing", decreasing, format!("gaps {}", sci_list(&gaps, 3))),
        Check::new("empirical order", min_order >= c.min_order, format!("min order {min_order:.4} >= {}", c.min_order)),
    ];
    let plot = Plot {
        title: format!("Monokinetic gap at t = {}", c.t),
        x_label: "eps".into(),
        y_label: "gap".into(),
        log_x: true,
        log_y: true,
        series: vec![Series { name: "gap".into(), points: c.epsilons.iter().copied().zip(gaps.iter().copied()).collect() }],
    };
    Ok(Outcome { table, checks, plot: Some(plot) })
}

fn sobolev(c: &config::SobolevGrowth) -> Result<Outcome> {
    require_sorted(&c.times, "times")?;
    let wkb: GaussianWkb = c.wkb.into();
    let ansatz = GaussianAnsatz::new(wkb, c.epsilon, c.lambda)?;
    let t_max = c.times.last().expect("nonempty").max(c.check_time);
    let traj = solve_tau(c.lambda, t_max, 1e-3)?;
    let states = ansatz.states_at(&c.times)?;
    let samples: Vec<(f64, f64)> = c.times.iter().zip(&states).map(|(&t, s)| (t, s.gradient_norm_sq())).collect();
    let report = sobolev_growth(&samples, c.epsilon, c.lambda, wkb.mass_sq(), &traj)?;
    let mut table = Table::new(&["t", "scaled_gradient", "comparator", "ratio"]);
    for r in &report.rows {
        table.push(vec![r.t.into(), r.scaled_gradient.into(), r.comparator.into(), r.ratio.into()]);
    }
    let at = report.ratio_at(c.check_time);
    let in_band = at.is_some_and(|r| (c.band[0]..=c.band[1]).contains(&r));
    let trending = report.rows.windows(2).all(|w| (w[1].ratio - 1.0).abs() <= (w[0].ratio - 1.0).abs());
    let checks = vec![
        Check::new(
            "ratio in band",
            in_band,
            format!("ratio({}) = {} in [{}, {}]", c.check_time, at.map_or("missing".into(), |r| format!("{r:.6}")), c.band[0], c.band[1]),
        ),
        Check::new("ratio approaches 1", trending, "|ratio - 1| non-increasing in t".into()),
    ];
    let plot = Plot {
        title: "Gradient growth ratio".into(),
        x_label: "t".into(),
        y_label: "ratio".into(),
        log_x: true,
        log_y: false,
        series: vec![Series { name: "ratio".into(), points: report.rows.iter().map(|r| (r.t, r.ratio)).collect() }],
    };
    Ok(Outcome { table, checks, plot: Some(plot) })
}

fn fp_decay(c: &config::FpDecay) -> Result<Outcome> {
    require_sorted(&c.times, "times")?;
    let grid = Grid1D::new(c.half_width, c.n)?;
    let g = grid.clone();
    let (centre, width_sq, rate) = (c.centre, c.width_sq, c.rate);
    let source = move |u: f64| g.sample(|x| (-rate * u).exp() * (x - centre) * (-(x - centre).powi(2) / width_sq).exp());
    let mut table = Table::new(&[
        "t",
        "n",
        "lhs_a",
        "bound_a",
        "headroom_a",
        "lhs_b",
        "bound_b",
        "headroom_b",
        "bound_b_half",
        "half_holds",
        "bound_b_uniform",
    ]);
    let mut checks = Vec::new();
    let mut series = Vec::new();
    for &n in &c.orders {
        let rows = fp_decay_certificate(&grid, &source, n, &c.times, c.panels)?;
        for r in &rows {
            table.push(vec![
                r.t.into(),
                n.into(),
                r.lhs_a.into(),
                r.bound_a.into(),
                r.headroom_a().into(),
                r.lhs_b.into(),
                r.bound_b.into(),
                r.headroom_b().into(),
                r.bound_b_half.into(),
                r.half_constant_holds().into(),
                r.bound_b_uniform.into(),
            ]);
            checks.push(Check::new(
                &format!("certificate n={n} t={}", r.t),
                r.passes(),
                format!(
                    "headroom {:.3} / {:.3} (need {CERTIFICATE_HEADROOM})",
                    r.headroom_a(),
                    r.headroom_b()
                ),
            ));
        }
        series.push(Series { name: format!("lhs n={n}"), points: rows.iter().map(|r| (r.t, r.lhs_a)).collect() });
        series.push(Series { name: format!("bound n={n}"), points: rows.iter().map(|r| (r.t, r.bound_a)).collect() });
    }
    let plot = Plot {
        title: "Source-term decay in W^{-n,1}".into(),
        x_label: "t".into(),
        y_label: "norm".into(),
        log_x: false,
        log_y: true,
        series,
    };
    Ok(Outcome { table, checks, plot: Some(plot) })
}

fn kie_gaussian(c: &config::KieGaussian) -> Result<Outcome> {
    require_sorted(&c.times, "times")?;
    let params = GaussianGaussianParams::new(c.lambda, c.c10, c.c20, c.c11, c.b0, c.b1)?;
    let t_max = c.times.last().expect("nonempty").max(c.energy_horizon).max(c.residual_time + 1.0);
    let traj = solve_c1(params, t_max, c.dt)?;
    let tau = solve_tau(c.lambda, t_max, c.dt)?;
    let grid = Grid1D::new(c.half_width, c.n)?;
    let profiles =
        c.times.par_iter().map(|&t| gg_rescaled_profile(&traj, &tau, t, &grid)).collect::<Result<Vec<_>>>()?;
    let mut table =
        Table::new(&["t", "c1", "c2", "l1_gap", "envelope", "gap_over_envelope", "w1", "ck_exact", "ck_plus_half"]);
    for p in &profiles {
        let env = p.envelope.unwrap_or(f64::NAN);
        table.push(vec![
            p.t.into(),
            traj.c1(p.t)?.into(),
            traj.c2(p.t)?.into(),
            p.l1_gap.into(),
            env.into(),
            (p.l1_gap / env).into(),
            p.w1.into(),
            p.ck_exact.into(),
            p.ck_plus_half.into(),
        ]);
    }
    let product_dev = c1c2_product_deviation(params, t_max, c.product_dt)?;
    let lattice = PhaseLattice::around(&traj, c.residual_time, c.lattice)?;
    let h = default_step(&traj, c.residual_time)?;
    let residuals: Vec<f64> =
        [h, h / 2.0, h / 4.0].iter().map(|&s| vlasov_residual(&traj, c.residual_time, &lattice, s)).collect::<Result<_>>()?;
    let ratios = [residuals[0] / residuals[1], residuals[1] / residuals[2]];
    let order_two = ratios.iter().all(|r| (ORDER_TWO_BAND.0..=ORDER_TWO_BAND.1).contains(r));
    let cons = kie_conservation_report(&traj, 0.0, c.energy_horizon, 50)?;
    let gaps: Vec<f64> = profiles.iter().map(|p| p.l1_gap).collect();
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let fitted = profiles.first().and_then(|p| p.envelope.map(|e| p.l1_gap / e)).unwrap_or(f64::NAN);
    let dominated = profiles.iter().all(|p| p.envelope.is_some_and(|e| p.l1_gap <= fitted * e * (1.0 + 1e-12)));
    let checks = vec![
        Check::new("c1 c2 constant", product_dev <= 1e-10, format!("max relative deviation {product_dev:.3e}")),
        Check::new("Vlasov residual order 2", order_two, format!("ratios {ratios:.4?}")),
        Check::new(
            "energy conservation",
            cons.energy_drift <= 1e-7,
            format!("drift {:.3e} over [0, {}]", cons.energy_drift, c.energy_horizon),
        ),
        Check::new(
            "moment laws",
            cons.x_second_residual <= 1e-6 && cons.cross_residual <= 1e-6 && cons.quadrature_deviation <= 1e-8,
            format!(
                "residuals {:.3e}, {:.3e}; quadrature {:.3e}",
                cons.x_second_residual, cons.cross_residual, cons.quadrature_deviation
            ),
        ),
        Check::new("L1 gap decreasing", decreasing, format!("gaps {}", sci_list(&gaps, 4))),
        Check::new(
            "L1 gap dominated by envelope",
            dominated,
            format!("constant {fitted:.4} fitted at t = {}", c.times[0]),
        ),
    ];
    let plot = Plot {
        title: "Rescaled Gaussian-Gaussian density".into(),
        x_label: "t".into(),
        y_label: "L1 distance".into(),
        log_x: true,
        log_y: true,
        series: vec![
            Series { name: "L1 gap".into(), points: profiles.iter().map(|p| (p.t, p.l1_gap)).collect() },
            Series {
                name: "fitted envelope".into(),
                points: profiles.iter().filter_map(|p| p.envelope.map(|e| (p.t, fitted * e))).collect(),
            },
        ],
    };
    Ok(Outcome { table, checks, plot: Some(plot) })
}

fn wigner_moments(c: &config::WignerMoments) -> Result<Outcome> {
    let grid = Grid1D::new(c.half_width, c.n)?;
    let u = gaussian_ansatz_oracle(c.wkb.into(), c.epsilon, c.lambda, c.t, &grid)?;
    let w = wigner_transform(&u)?;
    let wh = husimi_transform(&w)?;
    let moments = husimi_moments(&wh, &u)?;
    let mut table = Table::new(&["identity", "lhs", "rhs", "discrepancy"]);
    for m in &moments.identities {
        table.push(vec![Cell::Text(m.name.to_string()), m.lhs.into(), m.rhs.into(), m.discrepancy.into()]);
    }
    let (lo, hi) = wh.min_max();
    let mut checks: Vec<Check> = moments
        .identities
        .iter()
        .map(|m| Check::new(m.name, m.discrepancy <= c.tolerance, format!("{:.3e} <= {:e}", m.discrepancy, c.tolerance)))
        .collect();
    checks.push(Check::new("Husimi nonnegative", lo >= -c.tolerance * hi, format!("min {lo:.3e}, max {hi:.3e}")));
    checks.push(Check::new(
        "Wigner imaginary residue",
        w.imag_residue() <= c.tolerance,
        format!("{:.3e}", w.imag_residue()),
    ));
    Ok(Outcome { table, checks, plot: None })
}
