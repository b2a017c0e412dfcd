//! Config files, presets and the commands behind the `sda-bench` binary.

pub mod commands;
pub mod config;
pub mod presets;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_export_traj, cmd_presets, cmd_run, cmd_verify};
pub use config::{parse_config, parse_config_str, to_toml};

use crate::error::Error;
use crate::sda::MemorySchedule;
use crate::verify::Suite;

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "SDA_BENCH_OUT_DIR";

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const RUNTIME: i32 = 3;
    pub const INVARIANT: i32 = 4;
}

/// Exit status for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Argument(_) => exit::USAGE,
        Error::Validation(_) | Error::Config(_) | Error::Parse { .. } | Error::Domain(_) | Error::Unsupported(_) => {
            exit::VALIDATION
        }
        Error::Io { .. } | Error::Replication { .. } => exit::RUNTIME,
    }
}

#[derive(Debug, Parser)]
#[command(name = "sda-bench", version, about = "Dueling bandit simulations, baselines and invariant checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment and write CSV + manifest.
    Run(RunArgs),
    /// Run invariant and oracle checks.
    Verify(VerifyArgs),
    /// List presets, or print one as a config file.
    Presets(PresetsArgs),
    /// Export the round log of one replication as newline-delimited JSON.
    ExportTraj(ExportArgs),
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Experiment config file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named preset.
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct Overrides {
    /// Override the base seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the number of replications.
    #[arg(long)]
    pub replications: Option<u64>,
    /// Override the horizon.
    #[arg(long)]
    pub horizon: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, env = OUT_DIR_ENV, default_value = "results")]
    pub out_dir: PathBuf,
    /// Output file stem (defaults to the preset or config file name).
    #[arg(long)]
    pub name: Option<String>,
    /// Record every time step instead of ~200 log-spaced checkpoints.
    #[arg(long)]
    pub full_series: bool,
    /// Check leader-count, windowed-leader and storage invariants while running.
    #[arg(long)]
    pub invariant_checks: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// balance, lemma-wt, sw-leader, storage or all.
    #[arg(value_parser = parse_suite)]
    pub suite: Suite,
    #[arg(long, default_value_t = 50)]
    pub runs: u64,
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random balance queries.
    #[arg(long, default_value_t = 100)]
    pub queries: u64,
    /// Monte Carlo samples per balance query.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Memory schedule of the storage suite, e.g. `additive:50` or `max:50`.
    #[arg(long, default_value = "additive:50", value_parser = parse_schedule)]
    pub schedule: MemorySchedule,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Args)]
pub struct PresetsArgs {
    /// Print this preset as a config file.
    #[arg(long)]
    pub show: Option<String>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Policy label (defaults to the first dueling policy).
    #[arg(long)]
    pub policy: Option<String>,
    /// Replication index; the seed is `base_seed + index`.
    #[arg(long, default_value_t = 0)]
    pub replication: u64,
    /// Output file (defaults to `<out-dir>/<name>-<policy>-<seed>.ndjson`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = OUT_DIR_ENV, default_value = "results")]
    pub out_dir: PathBuf,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_schedule(s: &str) -> Result<MemorySchedule, String> {
    s.parse::<MemorySchedule>().map_err(|e| e.to_string())
}

/// Parses `args` and runs the command, returning the process exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Presets(a) => cmd_presets(&a),
        Command::ExportTraj(a) => cmd_export_traj(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
