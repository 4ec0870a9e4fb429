//! `monowave`: sampling, nodal sweeps, covariance checks and equivalence
//! reports for random monochromatic waves.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_length, ExperimentConfig, Overrides};
use error::CliResult;

#[derive(Parser)]
#[command(name = "monowave", version, about = "Random monochromatic wave experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample coefficient sets and classify the zeros of f.
    Sample(Shared),
    /// Count nodal components in balls of growing radius.
    NodalSweep(Shared),
    /// Compare empirical covariances of f and u with the analytic kernels.
    Covariance(Shared),
    /// Kakutani equivalence report for the law described by --config.
    Kakutani(Shared),
    /// Plot data and slope summary from a nodal-sweep directory.
    Report {
        /// Output directory of a nodal sweep.
        dir: PathBuf,
        /// Where to write the report (default: DIR/report).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Shared {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// First seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of consecutive seeds.
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    dim: Option<u8>,
    /// Largest ball radius, e.g. 60pi.
    #[arg(long, value_parser = length)]
    rmax: Option<f64>,
    /// Grid spacing, e.g. pi/20.
    #[arg(long, value_parser = length)]
    resolution: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores); results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

fn length(text: &str) -> Result<f64, String> {
    parse_length(text).map_err(|e| e.to_string())
}

impl Shared {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            seeds: self.seeds,
            dim: self.dim.map(usize::from),
            rmax: self.rmax,
            resolution: self.resolution,
            out: self.out.clone(),
            workers: self.workers,
        }
    }

    fn experiment(&self) -> CliResult<ExperimentConfig> {
        ExperimentConfig::load(self.config.as_deref(), &self.overrides())
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Sample(s) => commands::sample::run(&s.experiment()?),
        Command::NodalSweep(s) => commands::sweep::run(&s.experiment()?),
        Command::Covariance(s) => commands::covariance::run(&s.experiment()?),
        Command::Kakutani(s) => {
            let path = s
                .config
                .as_deref()
                .ok_or_else(|| error::CliError::config("kakutani needs --config with a [spec] section"))?;
            let job = commands::kakutani::KakutaniJob::load(path, s.dim.map(usize::from))?;
            commands::kakutani::run(&job, &s.out.unwrap_or_else(|| PathBuf::from("monowave-out")))
        }
        Command::Report { dir, out } => {
            let out = out.unwrap_or_else(|| dir.join("report"));
            commands::report::run(&dir, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("monowave: {e}");
            e.exit_code()
        }
    }
}
