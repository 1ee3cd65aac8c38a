//! `sim`: run one experiment and write its CSV.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 numerical failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use cavity_grover::config::ExperimentConfig;
use cavity_grover::experiment::{run_experiment, write_csv, Experiment};
use cavity_grover::Error;
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Gate,
    Search,
    Timing,
    Offset,
    Geometry,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::Gate => Experiment::Gate,
            Command::Search => Experiment::Search,
            Command::Timing => Experiment::Timing,
            Command::Offset => Experiment::Offset,
            Command::Geometry => Experiment::Geometry,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sim",
    version,
    about = "Three-qubit Grover search in a decaying cavity"
)]
struct Cli {
    #[arg(value_enum)]
    experiment: Command,
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination; overrides `out` in the config. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    /// Print summary scalars.
    #[arg(long)]
    summary: bool,
}

fn run(cli: Cli) -> Result<(), Error> {
    let config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    let experiment = Experiment::from(cli.experiment);
    let output = run_experiment(experiment, &config, cli.threads.map(|n| n as usize))?;

    let out = cli.out.or(config.out.clone());
    let stdout_err = |source| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    match &out {
        Some(path) => write_csv(experiment, &output.records, path)?,
        None => std::io::stdout()
            .write_all(&output.to_csv()?)
            .map_err(stdout_err)?,
    }
    if cli.summary {
        let text = output.summary_text();
        if out.is_some() {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(stdout_err)?;
        } else {
            eprint!("{text}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sim: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
