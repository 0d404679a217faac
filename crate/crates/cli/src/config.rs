use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mgl_core::cache::BallCache;
use mgl_core::Caps;
use serde::Deserialize;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Settings shared by every command. Loaded from a JSON file, then
/// overridden field by field from the command line.
#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub caps: Caps,
    pub format: Format,
    pub cache: bool,
    pub cache_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        ExperimentConfig { caps: Caps::default(), format: Format::Text, cache: true, cache_dir: None, seed: 0 }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("{}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.caps;
        let named = [
            ("max_free_ball", c.max_free_ball),
            ("max_group_ball", c.max_group_ball),
            ("max_evaluations", c.max_evaluations),
            ("nu_cap", c.nu_cap as u64),
            ("r_max", c.r_max),
        ];
        for (name, v) in named {
            if v == 0 {
                bail!("cap {name} must be positive");
            }
        }
        Ok(())
    }

    pub fn ball_cache(&self) -> Option<BallCache> {
        if !self.cache {
            return None;
        }
        Some(match &self.cache_dir {
            Some(dir) => BallCache::new(dir),
            None => BallCache::from_env(),
        })
    }
}
