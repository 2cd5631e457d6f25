use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qinterf::harness::{self, Format, Input, Report, RunOptions};
use qinterf::Result;

/// Real, complex or quaternionic? Interferometric tests of amplitude algebras.
#[derive(Debug, Parser)]
#[command(name = "qinterf", version)]
struct Cli {
    /// Classification tolerance on F (default: max(3·σ_F, 1e-9)).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for Monte-Carlo runs (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write the machine-readable report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Format printed on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a measured cross-section table.
    Classify { csv: PathBuf },
    /// Compute cross sections from configured amplitudes and classify them.
    Simulate {
        config: PathBuf,
        /// Write the simulated cross sections as a table.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Slab phases, composition order and fringe visibility.
    Neutron { config: PathBuf },
    /// Fit amplitudes to a measured cross-section table.
    Fit { csv: PathBuf },
    /// Counting-statistics simulation of F.
    Mc { config: PathBuf },
}

fn run(cli: &Cli) -> Result<Report> {
    let opts = RunOptions {
        tol: cli.tol,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Classify { csv } => harness::classify_csv(&Input::read(csv)?, &opts),
        Command::Fit { csv } => harness::fit_csv(&Input::read(csv)?, &opts),
        Command::Neutron { config } => harness::neutron_config(&Input::read(config)?, &opts),
        Command::Mc { config } => harness::monte_carlo_config(&Input::read(config)?, &opts),
        Command::Simulate { config, csv } => {
            let sim = harness::simulate_config(&Input::read(config)?, &opts)?;
            if let Some(path) = csv {
                harness::write_cross_sections(&sim.set, fs::File::create(path)?)?;
            }
            Ok(sim.report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|report| {
        if let Some(path) = &cli.out {
            fs::write(path, report.to_json())?;
        }
        std::io::stdout()
            .lock()
            .write_all(report.render(cli.format).as_bytes())?;
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
