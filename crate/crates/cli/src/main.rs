use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use logdisp_cli::config::{LoadedConfig, SCENARIOS};
use logdisp_cli::selftest::{self, Context};
use logdisp_cli::{run_config, scenarios, RunError, Status};

#[derive(Parser)]
#[command(name = "logdisp", version, about = "Numerical experiments for the logarithmic Schrodinger equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario named in a TOML config.
    Run { config: PathBuf },
    /// Check every module invariant.
    SelfTest {
        /// Vacuum floor factor used wherever ln|u|^2 is evaluated.
        #[arg(long, default_value_t = logdisp::lognls::DEFAULT_VACUUM_FACTOR)]
        vacuum_factor: f64,
    },
    /// Print the available scenarios.
    ListScenarios,
}

fn code(status: Status) -> ExitCode {
    ExitCode::from(status as u8)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::ListScenarios => {
            for name in SCENARIOS {
                println!("{name:<20} {}", scenarios::describe(name));
            }
            code(Status::Success)
        }
        Command::SelfTest { vacuum_factor } => {
            let report = selftest::run(&Context { vacuum_factor }, true);
            let failed = report.checks.iter().filter(|c| !c.pass).count();
            println!("{} of {} invariants passed", report.checks.len() - failed, report.checks.len());
            code(if failed == 0 { Status::Success } else { Status::AcceptanceFailure })
        }
        Command::Run { config } => {
            let result = LoadedConfig::load(&config).map_err(RunError::from).and_then(|c| run_config(&c));
            match result {
                Ok(art) => {
                    for c in &art.outcome.checks {
                        println!("{} {} ({})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
                    }
                    println!("wrote {}", art.csv.display());
                    if let Some(svg) = &art.svg {
                        println!("wrote {}", svg.display());
                    }
                    code(if art.outcome.passed() { Status::Success } else { Status::AcceptanceFailure })
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    code(Status::Failure)
                }
            }
        }
    }
}
