use std::path::{Path, PathBuf};

use regimes_core::models::STANDARD_ROSTER;
use regimes_core::{McmcConfig, Priors};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Run configuration, read from TOML.
///
/// ```toml
/// manifest = "manifest.toml"
/// models = ["NHHM_2", "HHM_2", "RW"]
/// horizons = 30
/// out = "out"
///
/// [mcmc]
/// iterations = 20000
/// burn_in = 10000
/// thin = 5
/// seed = 0
///
/// [priors]
/// coef_var = 100.0
/// ```
///
/// Relative paths resolve against the config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub manifest: PathBuf,
    #[serde(default = "default_models")]
    pub models: Vec<String>,
    #[serde(default = "default_horizons")]
    pub horizons: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub mcmc: McmcConfig,
    #[serde(default)]
    pub priors: Priors,
}

fn default_models() -> Vec<String> {
    STANDARD_ROSTER.iter().map(|s| s.to_string()).collect()
}

fn default_horizons() -> usize {
    30
}

fn default_out() -> PathBuf {
    "out".into()
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub models: Option<Vec<String>>,
    pub out: Option<PathBuf>,
    pub horizons: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path, over: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if cfg.manifest.is_relative() {
            cfg.manifest = base.join(&cfg.manifest);
        }
        if cfg.out.is_relative() {
            cfg.out = base.join(&cfg.out);
        }
        if let Some(s) = over.seed {
            cfg.mcmc.seed = s;
        }
        if let Some(m) = &over.models {
            cfg.models = m.clone();
        }
        if let Some(o) = &over.out {
            cfg.out = o.clone();
        }
        if let Some(h) = over.horizons {
            cfg.horizons = h;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.horizons == 0 {
            return Err(CliError::data("horizons must be at least 1"));
        }
        if self.models.is_empty() {
            return Err(CliError::data("model roster is empty"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for m in &self.models {
            if !seen.insert(m) {
                return Err(CliError::data(format!("model `{m}` listed twice")));
            }
        }
        self.mcmc.validate()?;
        self.priors.validate()?;
        Ok(())
    }
}
