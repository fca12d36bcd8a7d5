//! Command-line harness: every run is a [`RunConfig`], every artifact embeds
//! the resolved config and library version, and output files are replaced
//! atomically.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::Path;

pub use config::{CommandKind, Format, RunConfig};
pub use error::CliError;

/// Result of [`run`]: the config with defaults filled in, the rendered
/// artifact, and the one-line summary.
pub struct RunOutput {
    pub resolved: RunConfig,
    pub rendered: String,
    pub summary: String,
}

/// Executes `config` without touching the filesystem.
pub fn run(config: &RunConfig, workers: usize) -> Result<RunOutput, CliError> {
    if workers == 0 {
        return Err(CliError::config("workers", "at least one worker is required"));
    }
    let mut params = config::Params::new(config.parameters.clone());
    let artifact = commands::dispatch(config.command, &mut params, config.seed, workers)?;
    let resolved = RunConfig { parameters: params.finish()?, ..config.clone() };
    let rendered = output::render(&resolved, &artifact);
    Ok(RunOutput { resolved, rendered, summary: artifact.summary })
}

/// Runs `config` and writes the artifact to `output_path`, or returns it for
/// standard output when the path is empty.
pub fn execute(config: &RunConfig, workers: usize) -> Result<RunOutput, CliError> {
    let out = run(config, workers)?;
    if !config.output_path.is_empty() {
        output::write_atomic(Path::new(&config.output_path), &out.rendered)?;
    }
    Ok(out)
}
