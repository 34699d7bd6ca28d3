use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use openqs_cli::{run, Invocation, Verb};

/// Open-quantum-system simulator and density-matrix sonifier.
#[derive(Parser)]
#[command(name = "openqs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues, mapped frequencies, and well probability densities.
    Spectrum(CommonArgs),
    /// Integrate the configured dynamics and export observables/trajectory.
    Evolve(CommonArgs),
    /// Render the trajectory to binaural stereo audio (runs evolve if needed).
    Render(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides [output].dir in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long)]
    overwrite: bool,
    /// Override the stochastic base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress progress notes and warnings on stderr.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (verb, args) = match cli.command {
        Command::Spectrum(a) => (Verb::Spectrum, a),
        Command::Evolve(a) => (Verb::Evolve, a),
        Command::Render(a) => (Verb::Render, a),
    };
    let invocation = Invocation {
        verb,
        config_path: args.config,
        out_dir: args.out,
        overwrite: args.overwrite,
        seed: args.seed,
        quiet: args.quiet,
    };
    match run(&invocation) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
