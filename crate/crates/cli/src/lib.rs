//! Command-line front end: cone parsing, experiment orchestration and
//! reproducible outputs.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{Cli, Command, CommandKind, ExperimentConfig, Format, RerunArgs, RunArgs};
pub use error::CliError;
pub use output::{Manifest, Table};
pub use run::{execute, rerun, run, run_config, Outcome, RunResult};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "CONIC_WORKERS";

/// Maps a parsed subcommand to its configuration, or `None` for `rerun`.
pub fn config_of(cmd: Command) -> Result<ExperimentConfig, RerunArgs> {
    let (kind, args) = match cmd {
        Command::IntrinsicVolumes(a) => (CommandKind::IntrinsicVolumes, a),
        Command::SteinerCheck(a) => (CommandKind::SteinerCheck, a),
        Command::LocalSteinerCheck(a) => (CommandKind::LocalSteinerCheck, a),
        Command::HolderCurve(a) => (CommandKind::HolderCurve, a),
        Command::ProjectionBounds(a) => (CommandKind::ProjectionBounds, a),
        Command::SteinerTable(a) => (CommandKind::SteinerTable, a),
        Command::Distance(a) => (CommandKind::Distance, a),
        Command::SupportMeasure(a) => (CommandKind::SupportMeasure, a),
        Command::Rerun(r) => return Err(r),
    };
    Ok(ExperimentConfig::new(kind, args))
}

/// Runs a parsed subcommand.
pub fn dispatch(cmd: Command) -> Result<RunResult, CliError> {
    match config_of(cmd) {
        Ok(cfg) => run_config(&cfg),
        Err(r) => rerun(&r),
    }
}
