//! TOML experiment configuration.
//!
//! A config names one scenario and may carry an `[output]` table and one table per scenario.
//! Every key has a default, so `scenario = "fp_decay"` alone is a valid file.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use logdisp::lognls::GaussianWkb;

pub const SCENARIOS: [&str; 6] =
    ["convergence_rate", "semiclassical_sweep", "sobolev_growth", "fp_decay", "kie_gaussian", "wigner_moments"];

/// Environment variable overriding `[output] dir`.
pub const OUTDIR_ENV: &str = "LOGDISP_OUTDIR";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown scenario {0:?}; run `logdisp list-scenarios`")]
    UnknownScenario(String),
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: String,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub convergence_rate: ConvergenceRate,
    #[serde(default)]
    pub semiclassical_sweep: SemiclassicalSweep,
    #[serde(default)]
    pub sobolev_growth: SobolevGrowth,
    #[serde(default)]
    pub fp_decay: FpDecay,
    #[serde(default)]
    pub kie_gaussian: KieGaussian,
    #[serde(default)]
    pub wigner_moments: WignerMoments,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub plot: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("results"), plot: true }
    }
}

/// Gaussian WKB datum `sqrt(rho* exp(-sigma0 x^2)) exp(i (omega0 x^2/2 + p0 x) / eps)`.
#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Wkb {
    pub rho_star: f64,
    pub sigma0: f64,
    pub omega0: f64,
    pub p0: f64,
}

impl Default for Wkb {
    fn default() -> Self {
        Self { rho_star: 1.0, sigma0: 1.0, omega0: 0.0, p0: 0.0 }
    }
}

impl From<Wkb> for GaussianWkb {
    fn from(w: Wkb) -> Self {
        GaussianWkb { rho_star: w.rho_star, sigma0: w.sigma0, omega0: w.omega0, p0: w.p0 }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceRate {
    pub epsilon: f64,
    pub lambda: f64,
    pub half_width: f64,
    pub n: usize,
    pub dt: f64,
    pub tau_dt: f64,
    pub vacuum_factor: f64,
    pub times: Vec<f64>,
    /// Ratios are required to be non-increasing from this time on.
    pub monotone_from: f64,
    pub wkb: Wkb,
}

impl Default for ConvergenceRate {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            lambda: 1.0,
            half_width: 16.0,
            n: 512,
            dt: 1e-2,
            tau_dt: 1e-3,
            vacuum_factor: 1e-30,
            times: vec![2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0, 50.0, 70.0, 100.0],
            monotone_from: 10.0,
            wkb: Wkb::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SemiclassicalSweep {
    pub epsilons: Vec<f64>,
    pub t: f64,
    pub lambda: f64,
    pub half_width: f64,
    pub n: usize,
    pub dt: f64,
    pub min_order: f64,
    pub wkb: Wkb,
}

impl Default for SemiclassicalSweep {
    fn default() -> Self {
        Self {
            epsilons: vec![1.0, 0.5, 0.25, 0.125],
            t: 1.0,
            lambda: 1.0,
            half_width: 16.0,
            n: 1024,
            dt: 1e-3,
            min_order: 0.9,
            wkb: Wkb { rho_star: 1.0, sigma0: 1.0, omega0: 0.5, p0: 1.0 },
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SobolevGrowth {
    pub epsilon: f64,
    pub lambda: f64,
    pub times: Vec<f64>,
    pub check_time: f64,
    pub band: [f64; 2],
    pub wkb: Wkb,
}

impl Default for SobolevGrowth {
    fn default() -> Self {
        Self {
            epsilon: 0.5,
            lambda: 1.0,
            times: vec![10.0, 20.0, 30.0, 50.0, 70.0, 100.0],
            check_time: 50.0,
            band: [0.7, 1.3],
            wkb: Wkb::default(),
        }
    }
}

/// Source `h(u, x) = e^{-rate u} (x - centre) exp(-(x - centre)^2 / width_sq)`.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FpDecay {
    pub half_width: f64,
    pub n: usize,
    pub times: Vec<f64>,
    pub orders: Vec<u32>,
    pub centre: f64,
    pub width_sq: f64,
    pub rate: f64,
    pub panels: usize,
}

impl Default for FpDecay {
    fn default() -> Self {
        Self {
            half_width: 8.0,
            n: 256,
            times: vec![0.5, 1.0, 2.0],
            orders: vec![1, 2],
            centre: 0.3,
            width_sq: 0.5,
            rate: 1.0,
            panels: 32,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct KieGaussian {
    pub lambda: f64,
    pub c10: f64,
    pub c20: f64,
    pub c11: f64,
    pub b0: f64,
    pub b1: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub half_width: f64,
    pub n: usize,
    pub residual_time: f64,
    pub lattice: usize,
    pub energy_horizon: f64,
    pub product_dt: f64,
}

impl Default for KieGaussian {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            c10: 1.0,
            c20: 1.0,
            c11: 0.3,
            b0: 0.2,
            b1: 0.5,
            dt: 1e-2,
            times: vec![10.0, 100.0, 1000.0, 10000.0],
            half_width: 10.0,
            n: 512,
            residual_time: 1.0,
            lattice: 24,
            energy_horizon: 10.0,
            product_dt: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct WignerMoments {
    pub epsilon: f64,
    pub lambda: f64,
    pub t: f64,
    pub half_width: f64,
    pub n: usize,
    pub tolerance: f64,
    pub wkb: Wkb,
}

impl Default for WignerMoments {
    fn default() -> Self {
        Self {
            epsilon: 0.5,
            lambda: 1.0,
            t: 1.0,
            half_width: 16.0,
            n: 512,
            tolerance: 1e-6,
            wkb: Wkb { rho_star: 1.0, sigma0: 1.0, omega0: 0.5, p0: 1.0 },
        }
    }
}

/// A parsed config together with the SHA-256 of its source text.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: Config,
    pub sha256: String,
}

impl LoadedConfig {
    pub fn from_str(text: &str) -> Result<Self, ConfigError> {
        let config: Config = toml::from_str(text)?;
        if !SCENARIOS.contains(&config.scenario.as_str()) {
            return Err(ConfigError::UnknownScenario(config.scenario));
        }
        let digest = Sha256::digest(text.as_bytes());
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self { config, sha256 })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::from_str(&text)
    }

    /// Output directory after applying [`OUTDIR_ENV`].
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTDIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.config.output.dir.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = LoadedConfig::from_str("scenario = \"fp_decay\"\n").unwrap();
        assert_eq!(c.config.fp_decay, FpDecay::default());
        assert_eq!(c.sha256.len(), 64);
    }

    #[test]
    fn rejects_unknown_keys_and_scenarios() {
        assert!(matches!(LoadedConfig::from_str("scenario = \"nope\""), Err(ConfigError::UnknownScenario(_))));
        assert!(matches!(
            LoadedConfig::from_str("scenario = \"fp_decay\"\n[fp_decay]\nbogus = 1\n"),
            Err(ConfigError::Parse(_))
        ));
    }
}
