use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bbmb::commands;
use bbmb::config::ScenarioConfig;

/// Boundary-feedback stabilization experiments for a dispersive-diffusive
/// conservation law on the unit interval.
#[derive(Parser)]
#[command(name = "bbmb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write the time-series CSV.
    Simulate {
        /// Scenario file (key = value lines).
        config: PathBuf,
    },
    /// Mesh-refinement study against a refined reference run.
    Convergence {
        config: PathBuf,
        /// Cell counts, coarse to fine (must divide the reference count).
        #[arg(long, value_delimiter = ',', required = true)]
        cells: Vec<usize>,
        /// Reference mesh refinement relative to the finest entry.
        #[arg(long, default_value_t = 8)]
        ref_factor: usize,
        /// Time at which errors are measured.
        #[arg(long)]
        t_eval: f64,
    },
    /// Sweep the dispersion coefficient toward the Burgers limit.
    SweepMu {
        config: PathBuf,
        /// Dispersion coefficients; must include 0.
        #[arg(long, value_delimiter = ',', required = true)]
        mus: Vec<f64>,
    },
    /// Run the built-in invariant suite.
    Check,
}

fn run(cli: Cli) -> bbmb::Result<()> {
    match cli.command {
        Command::Simulate { config } => {
            let cfg = ScenarioConfig::from_file(&config)?;
            let path = commands::cmd_simulate(&cfg)?;
            println!("wrote {}", path.display());
        }
        Command::Convergence {
            config,
            cells,
            ref_factor,
            t_eval,
        } => {
            let cfg = ScenarioConfig::from_file(&config)?;
            let path = commands::cmd_convergence(&cfg, &cells, ref_factor, t_eval)?;
            println!("wrote {}", path.display());
        }
        Command::SweepMu { config, mus } => {
            let cfg = ScenarioConfig::from_file(&config)?;
            let path = commands::cmd_sweep_mu(&cfg, &mus)?;
            println!("wrote {}", path.display());
        }
        Command::Check => commands::cmd_check()?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
