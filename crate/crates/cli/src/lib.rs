//! Experiment runner for the `logdisp` numerical laboratory.

pub mod config;
pub mod output;
pub mod plot;
pub mod scenarios;
pub mod selftest;

use std::fs;
use std::path::PathBuf;

use config::LoadedConfig;

/// Exit status of `logdisp run`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Failure = 1,
    AcceptanceFailure = 2,
}

/// Files written by a scenario run.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
    pub outcome: scenarios::Outcome,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error("scenario failed: {0}")]
    Numerics(#[from] logdisp::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot encode CSV: {0}")]
    Csv(#[from] csv::Error),
}

/// `# scenario=... config_sha256=... logdisp-core=... logdisp-cli=...`
pub fn provenance(loaded: &LoadedConfig) -> String {
    format!(
        "scenario={} config_sha256={} logdisp-core={} logdisp-cli={}",
        loaded.config.scenario,
        loaded.sha256,
        logdisp::VERSION,
        env!("CARGO_PKG_VERSION")
    )
}

/// Runs the configured scenario and writes `<outdir>/<scenario>.csv` (and `.svg`).
pub fn run_config(loaded: &LoadedConfig) -> Result<Artifacts, RunError> {
    let outcome = scenarios::run(&loaded.config)?;
    let dir = loaded.output_dir();
    fs::create_dir_all(&dir)?;
    let name = &loaded.config.scenario;
    let csv = dir.join(format!("{name}.csv"));
    fs::write(&csv, outcome.table.to_csv(&provenance(loaded))?)?;
    let svg = match (&outcome.plot, loaded.config.output.plot) {
        (Some(plot), true) => {
            let path = dir.join(format!("{name}.svg"));
            fs::write(&path, plot.to_svg())?;
            Some(path)
        }
        _ => None,
    };
    Ok(Artifacts { csv, svg, outcome })
}
