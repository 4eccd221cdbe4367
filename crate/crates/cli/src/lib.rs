//! Config loading, subcommand dispatch and report writing for `maglat`.

pub mod config;
pub mod report;
pub mod run;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{emit_config, load_config, parse_config, Config, ConfigError};
pub use report::Format;
pub use run::{execute, Command, RunError, RunResult};

#[derive(Debug, Parser)]
#[command(
    name = "maglat",
    version,
    about = "Trap sites, bands and barriers above patterned magnetic films"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "./out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; all cores when unset.
    #[arg(long, env = "MAGLAT_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// |B| on the field-map grid.
    FieldMap(CommonArgs),
    /// Refined trap sites with Hessian eigenvalues and band labels.
    Sites(CommonArgs),
    /// Band table and gaps between adjacent bands.
    Bands(CommonArgs),
    /// Barriers between nearest neighbours inside each band.
    Barriers(CommonArgs),
    /// Trap frequencies, depths, harmonic level counts and tunnelling.
    Levels(CommonArgs),
    /// Trap analysis repeated over the configured bias values.
    Sweep(CommonArgs),
}

impl CliCommand {
    pub fn split(&self) -> (Command, &CommonArgs) {
        match self {
            Self::FieldMap(a) => (Command::FieldMap, a),
            Self::Sites(a) => (Command::Sites, a),
            Self::Bands(a) => (Command::Bands, a),
            Self::Barriers(a) => (Command::Barriers, a),
            Self::Levels(a) => (Command::Levels, a),
            Self::Sweep(a) => (Command::Sweep, a),
        }
    }
}

/// Loads the config, runs the command and writes its files. Returns the summary line.
pub fn dispatch(command: Command, args: &CommonArgs) -> Result<String, RunError> {
    let config = load_config(&args.config)?;
    let result = execute(command, &config, args.format)?;
    run::write_outputs(&args.out, &result.outputs)?;
    Ok(result.summary)
}
