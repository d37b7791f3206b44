//! `freqswap`: runs experiment files through the swap simulator.
//!
//! Exit status: 0 on success, 1 on a configuration or usage error, 2 when
//! the frequency-sum measurement post-selects nothing.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use freqswap::SwapPath;

#[derive(Parser, Debug)]
#[command(
    name = "freqswap",
    version,
    about = "Frequency entanglement swapping simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectra and Schmidt data of both source biphotons.
    Biphoton(RunArgs),
    /// Joint detection-time densities of the biphotons and the swapped pair.
    TimeCoincidence(RunArgs),
    /// Runs the swap and writes the result bundle.
    Swap(RunArgs),
    /// Samples the swapped pair and histograms the coincidences.
    Sample(RunArgs),
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Experiment file (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Directory for summary.json and the CSV tables.
    #[arg(long, value_name = "DIR", default_value = "results")]
    out: PathBuf,
    /// Overrides `sampling.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `sampling.trials`.
    #[arg(long)]
    trials: Option<u64>,
    /// Overrides the measurement path from the file.
    #[arg(long, value_enum)]
    path: Option<PathArg>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PathArg {
    Ideal,
    Physical,
}

impl From<PathArg> for SwapPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Ideal => SwapPath::IdealProjector,
            PathArg::Physical => SwapPath::PhysicalMergeDetect,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };

    let result = match &cli.command {
        Command::Biphoton(a) => commands::biphoton(a),
        Command::TimeCoincidence(a) => commands::time_coincidence(a),
        Command::Swap(a) => commands::swap(a),
        Command::Sample(a) => commands::sample(a),
    };
    match result {
        Ok(commands::Status::Done) => ExitCode::SUCCESS,
        Ok(commands::Status::EmptyPostSelection) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
