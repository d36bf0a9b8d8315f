//! Config-driven experiment runner for the `finbath` library.

pub mod config;
pub mod emit;
pub mod run;

pub use config::{parse_config, ConfigError, ExperimentConfig, Format, Scenario};
pub use emit::emit;
pub use run::{run_scenario, Cell, RunError, RunOutput, Table};

use std::path::Path;

/// Command-line overrides, applied to a parsed config before defaults are filled in.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<String>,
    pub seed: Option<u64>,
    pub formats: Option<Vec<Format>>,
}

impl Overrides {
    pub fn apply(&self, mut cfg: ExperimentConfig) -> ExperimentConfig {
        if let Some(s) = self.seed {
            cfg.seed = Some(s);
        }
        if self.output_dir.is_some() || self.formats.is_some() {
            let out = cfg.output.get_or_insert(config::OutputConfig { directory: None, formats: None });
            if let Some(d) = &self.output_dir {
                out.directory = Some(d.clone());
            }
            if let Some(f) = &self.formats {
                out.formats = Some(f.clone());
            }
        }
        cfg
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("cannot read config {path}: {source}")]
    ReadConfig { path: String, source: std::io::Error },
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::ReadConfig { .. } => 2,
            CliError::Run(_) | CliError::Write(_) => 3,
        }
    }
}

/// Read, override and resolve a config file.
pub fn load_config(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::ReadConfig { path: path.display().to_string(), source })?;
    let cfg = parse_config(&text)?;
    Ok(overrides.apply(cfg).resolve()?)
}
