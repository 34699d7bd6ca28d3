//! Library surface of the command-line front end, exposed so integration
//! tests can drive the exact pipelines the binary runs.

pub mod commands;
pub mod config;
pub mod error;
pub mod store;
pub mod table;

use std::path::PathBuf;

use config::RunConfig;
use error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Spectrum,
    Evolve,
    Render,
}

#[derive(Debug, Clone)]
pub struct Invocation {
    pub verb: Verb,
    pub config_path: PathBuf,
    pub out_dir: Option<PathBuf>,
    pub overwrite: bool,
    pub seed: Option<u64>,
    pub quiet: bool,
}

/// Loads the config, applies CLI overrides, and dispatches the verb.
pub fn run(invocation: &Invocation) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&invocation.config_path).map_err(|e| {
        CliError::Config(format!(
            "cannot read config {}: {e}",
            invocation.config_path.display()
        ))
    })?;
    let mut config: RunConfig = config::parse_config(&text)?.resolve()?;
    if invocation.overwrite {
        config.overwrite = true;
    }
    if let Some(seed) = invocation.seed {
        config.override_seed(seed);
    }
    let out_dir = invocation
        .out_dir
        .clone()
        .or_else(|| config.out_dir.clone())
        .ok_or_else(|| {
            CliError::Config("no output directory: pass --out or set [output].dir".into())
        })?;

    match invocation.verb {
        Verb::Spectrum => commands::cmd_spectrum(&config, &out_dir, invocation.quiet),
        Verb::Evolve => commands::cmd_evolve(&config, &out_dir, invocation.quiet).map(|_| ()),
        Verb::Render => commands::cmd_render(&config, &out_dir, invocation.quiet),
    }
}
