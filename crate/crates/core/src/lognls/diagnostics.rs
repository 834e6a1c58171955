use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::Density;
use crate::scaling::TauTrajectory;

/// First and second moment diagnostics of a rescaled trace `t -> |v(t)|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentDiagnostics {
    pub times: Vec<f64>,
    /// `tau(t) int y |v|^2`, affine in `t` for exact solutions.
    pub i2: Vec<f64>,
    /// Second differences of `i2` over consecutive triples (divided-difference form, scaled by the spacings).
    pub second_differences: Vec<f64>,
    /// `max |i2|`.
    pub scale: f64,
    /// `|int y^2 |v|^2 - int y^2 gamma^2|`.
    pub second_moment_deviation: Vec<f64>,
    /// `(tau' + 1) / tau'^2`, infinite at `t = 0`.
    pub envelope_shape: Vec<f64>,
    /// Smallest `C` with deviation `<= C * shape` at every `t > 0`.
    pub envelope_constant: f64,
}

impl MomentDiagnostics {
    pub fn max_second_difference(&self) -> f64 {
        self.second_differences.iter().fold(0.0, |m, d| m.max(d.abs()))
    }
}

pub fn moment_identities(trace: &[(f64, Density)], traj: &TauTrajectory) -> Result<MomentDiagnostics> {
    if trace.len() < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 samples, got {}", trace.len())));
    }
    let mut times = Vec::with_capacity(trace.len());
    let mut i2 = Vec::with_capacity(trace.len());
    let mut dev = Vec::with_capacity(trace.len());
    let mut shape = Vec::with_capacity(trace.len());
    let reference = 0.5 * PI.sqrt();
    let mut constant = 0.0_f64;
    for (t, rho) in trace {
        let (tau, tau_dot) = traj.eval(*t)?;
        times.push(*t);
        i2.push(tau * rho.first_moment());
        let d = (rho.second_moment() - reference).abs();
        let s = if tau_dot > 0.0 { (tau_dot + 1.0) / (tau_dot * tau_dot) } else { f64::INFINITY };
        if s.is_finite() {
            constant = constant.max(d / s);
        }
        dev.push(d);
        shape.push(s);
    }
    let mut second = Vec::with_capacity(trace.len() - 2);
    for k in 1..times.len() - 1 {
        let h1 = times[k] - times[k - 1];
        let h2 = times[k + 1] - times[k];
        if !(h1 > 0.0 && h2 > 0.0) {
            return Err(Error::InvalidParameter("trace times must increase strictly".into()));
        }
        let dd = 2.0 * ((i2[k + 1] - i2[k]) / h2 - (i2[k] - i2[k - 1]) / h1) / (h1 + h2);
        second.push(dd * h1 * h2);
    }
    let scale = i2.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(MomentDiagnostics {
        times,
        i2,
        second_differences: second,
        scale,
        second_moment_deviation: dev,
        envelope_shape: shape,
        envelope_constant: constant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevRow {
    pub t: f64,
    /// `eps^2 ||u'||^2`.
    pub scaled_gradient: f64,
    /// `2 lambda ||u_in||^2 ln tau(t)`.
    pub comparator: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolevReport {
    pub rows: Vec<SobolevRow>,
}

impl SobolevReport {
    pub fn ratio_at(&self, t: f64) -> Option<f64> {
        self.rows.iter().find(|r| (r.t - t).abs() <= 1e-9 * t.max(1.0)).map(|r| r.ratio)
    }
}

/// Compares `eps^2 ||u'(t)||^2` with `2 lambda ||u_in||^2 ln tau(t)` on samples `(t, ||u'(t)||^2)`.
pub fn sobolev_growth(
    samples: &[(f64, f64)],
    epsilon: f64,
    lambda: f64,
    mass_sq: f64,
    traj: &TauTrajectory,
) -> Result<SobolevReport> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    if !(lo > 0.0 && hi >= 10.0 * lo) {
        return Err(Error::InvalidParameter("samples must span at least one decade of t > 0".into()));
    }
    let rows = samples
        .iter()
        .map(|&(t, grad_sq)| {
            let comparator = 2.0 * lambda * mass_sq * traj.tau(t)?.ln();
            let scaled = epsilon * epsilon * grad_sq;
            Ok(SobolevRow { t, scaled_gradient: scaled, comparator, ratio: scaled / comparator })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SobolevReport { rows })
}
