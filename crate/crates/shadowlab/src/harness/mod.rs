//! Experiment harness: JSON configs, the six packaged experiments,
//! reports with gate/advisory verdicts, and the CLI front end.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod report;

pub use cli::run_cli;
pub use config::{ExperimentConfig, ExperimentKind, MapConfig, ResolvedConfig};
pub use experiments::run;
pub use report::{ExperimentReport, Table, Verdict, VerdictKind};
