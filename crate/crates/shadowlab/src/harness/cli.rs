//! Command-line front end.
//!
//! Exit codes: 0 all gates passed, 1 a gate failed or a runtime error
//! occurred, 2 usage or config error, 3 resource limit exceeded.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};

use super::config::{ExperimentConfig, ExperimentKind, ResolvedConfig};
use super::experiments;

#[derive(Parser)]
#[command(
    name = "shadowlab",
    version,
    about = "Shadowing, inverse shadowing, and transport distances for catalog dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// List the packaged experiments.
    List,
    /// Run one experiment and write its report under the output directory.
    Run {
        /// Experiment name (see `shadowlab list`).
        experiment: String,
        /// Path to a JSON config file; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output root directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Omit wall-clock timing from the report so outputs are byte-stable.
        #[arg(long)]
        no_timestamp: bool,
    },
}

/// Parse `args` and run; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    match cli.command {
        Commands::List => {
            for kind in ExperimentKind::all() {
                println!("{:16} {}", kind.name(), kind.describe());
            }
            0
        }
        Commands::Run {
            experiment,
            config,
            out,
            seed,
            no_timestamp,
        } => match execute(&experiment, config.as_deref(), &out, seed, no_timestamp) {
            Ok(true) => 0,
            Ok(false) => 1,
            Err(err) => {
                eprintln!("error: {err}");
                match err {
                    Error::Config(_) => 2,
                    Error::ResourceLimit(_) => 3,
                    _ => 1,
                }
            }
        },
    }
}

fn execute(
    experiment: &str,
    config: Option<&Path>,
    out: &Path,
    seed: Option<u64>,
    no_timestamp: bool,
) -> Result<bool> {
    let kind = ExperimentKind::parse(experiment)?;
    let raw = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|err| {
                Error::Config(format!("cannot read config {}: {err}", path.display()))
            })?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    let mut cfg = ResolvedConfig::resolve(kind, &raw)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let started = Instant::now();
    let mut report = experiments::run(kind, &cfg)?;
    if !no_timestamp {
        report.wall_clock_ms = Some(started.elapsed().as_millis() as u64);
    }
    report.write(out)?;
    print!("{}", report.summary());
    println!("wrote {}", report.output_dir(out).display());
    Ok(report.pass)
}
