//! `coupled-wave`: scenario-driven front end for the simulation, spectral,
//! resolvent and weighted-estimate checks.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand};

use commands::{Outcome, Sink};
use config::ScenarioConfig;

#[derive(Parser)]
#[command(name = "coupled-wave", version, about = "Coupled wave system with localized damping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output CSV (a directory for `report`); CSV goes to stdout if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Rerun on the grid with h halved and compare.
    #[arg(long, global = true)]
    refine: bool,
    /// Print the summary as JSON.
    #[arg(long, global = true)]
    json_summary: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Time-step the scenario and write the energy history.
    Simulate,
    /// Eigenvalues of the generator and the spectral-region fit.
    Spectrum,
    /// Resolvent norm along the imaginary axis.
    Resolvent,
    /// λ sweep of the weighted elliptic estimate.
    Carleman,
    /// Closed-form counterexample against the simulation.
    Counterexample,
    /// Every check the scenario configures, into the --out directory.
    Report,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Spectrum => "spectrum",
            Command::Resolvent => "resolvent",
            Command::Carleman => "carleman",
            Command::Counterexample => "counterexample",
            Command::Report => "report",
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("COUPLED_WAVE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| anyhow!("COUPLED_WAVE_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<Outcome> {
    configure_threads()?;
    let sink = cli.out.clone().map_or(Sink::Stdout, Sink::File);
    let load = || -> Result<ScenarioConfig> {
        let path = cli.config.as_ref().ok_or_else(|| anyhow!("--config is required for this command"))?;
        ScenarioConfig::load(path)
    };
    match cli.command {
        Command::Simulate => commands::cmd_simulate(&load()?, &sink, cli.refine),
        Command::Spectrum => commands::cmd_spectrum(&load()?, &sink, cli.refine),
        Command::Resolvent => commands::cmd_resolvent(&load()?, &sink, cli.refine),
        Command::Carleman => commands::cmd_carleman(&load()?, &sink),
        Command::Counterexample => commands::cmd_counterexample(&sink),
        Command::Report => {
            let Some(dir) = &cli.out else { bail!("report needs --out DIR") };
            commands::cmd_report(&load()?, dir, cli.refine)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    match run(&cli) {
        Ok(o) => {
            if cli.json_summary {
                println!("{}", o.to_json(name));
            } else {
                eprintln!("{}", o.line(name));
            }
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
