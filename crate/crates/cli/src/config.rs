//! Command-line and manifest configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "conic", version = env!("CONIC_GIT_DESCRIBE"), about = "Conic support measure experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo intrinsic volumes v_0..v_d.
    IntrinsicVolumes(RunArgs),
    /// Master Steiner identity for each (cone, f, eta).
    SteinerCheck(RunArgs),
    /// Local Steiner identity for each (cone, lambda, eta).
    LocalSteinerCheck(RunArgs),
    /// Bounded-Lipschitz distance against sqrt(theta) along a rotation family.
    HolderCurve(RunArgs),
    /// Moreau invariants and projection-stability bounds on rotation pairs.
    ProjectionBounds(RunArgs),
    /// Steiner coefficients g_k(lambda), I_k(f) and the inversion matrix.
    SteinerTable(RunArgs),
    /// Angular Hausdorff and bounded-Lipschitz distances between two cones.
    Distance(RunArgs),
    /// Empirical support measure atoms with a JSON sidecar.
    SupportMeasure(RunArgs),
    /// Repeats a run from its manifest.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum CommandKind {
    IntrinsicVolumes,
    SteinerCheck,
    LocalSteinerCheck,
    HolderCurve,
    ProjectionBounds,
    SteinerTable,
    Distance,
    SupportMeasure,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::IntrinsicVolumes => "intrinsic-volumes",
            CommandKind::SteinerCheck => "steiner-check",
            CommandKind::LocalSteinerCheck => "local-steiner-check",
            CommandKind::HolderCurve => "holder-curve",
            CommandKind::ProjectionBounds => "projection-bounds",
            CommandKind::SteinerTable => "steiner-table",
            CommandKind::Distance => "distance",
            CommandKind::SupportMeasure => "support-measure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by all experiment commands; each command reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RunArgs {
    /// Cone spec: inline (`orthant:3`, `rotated:orthant:2,1,2,0.1`, ...) or a cone file. Repeatable.
    #[arg(long = "cone")]
    pub cones: Vec<String>,
    /// Monte Carlo sample count.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated angles in [0, pi/2).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambdas: Vec<f64>,
    /// Function tag: one, norm_sq_c, norm_sq_polar, moment:m,n, steiner:lambda. Repeatable.
    #[arg(long = "f")]
    pub fs: Vec<String>,
    /// Biconic set: all, or cap:<u>/<theta_u>/<v>/<theta_v>. Repeatable.
    #[arg(long = "eta")]
    pub etas: Vec<String>,
    /// Comma-separated degrees.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Comma-separated rotation angles.
    #[arg(long, value_delimiter = ',')]
    pub thetas: Vec<f64>,
    /// Rotation plane `i,j` (1-based).
    #[arg(long, default_value = "1,2")]
    pub plane: String,
    /// Ambient dimension for steiner-table.
    #[arg(long)]
    pub d: Option<usize>,
    /// Certified angular distance brackets (d <= 3).
    #[arg(long)]
    pub certify: bool,
    /// Print timing and solver statistics to stderr.
    #[arg(long)]
    #[serde(default)]
    pub stats: bool,
    /// Output file; stdout when absent. A manifest is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl Default for RunArgs {
    fn default() -> Self {
        RunArgs {
            cones: Vec::new(),
            n: None,
            seed: 0,
            lambdas: Vec::new(),
            fs: Vec::new(),
            etas: Vec::new(),
            k: Vec::new(),
            thetas: Vec::new(),
            plane: "1,2".into(),
            d: None,
            certify: false,
            stats: false,
            out: None,
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct RerunArgs {
    /// Manifest written by an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Overrides the recorded output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One experiment: the command and its flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    #[serde(flatten)]
    pub args: RunArgs,
}

impl ExperimentConfig {
    pub fn new(command: CommandKind, args: RunArgs) -> Self {
        ExperimentConfig { command, args }
    }
}
