//! Experiment configuration files.
//!
//! A config is a JSON object with the experiment name, one explicit seed,
//! named input paths (resolved against the config's directory), numeric
//! options specific to the command, and an optional output directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig<T> {
    pub experiment: String,
    pub seed: u64,
    #[serde(default)]
    pub inputs: BTreeMap<String, PathBuf>,
    pub options: T,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl<T: DeserializeOwned> ExperimentConfig<T> {
    /// Reads a config and checks that every referenced input exists.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: Self =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in cfg.inputs.values_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
            if !p.exists() {
                bail!("input {} does not exist", p.display());
            }
        }
        if let Some(d) = cfg.output_dir.as_mut() {
            if d.is_relative() {
                *d = base.join(&*d);
            }
        }
        Ok(cfg)
    }
}

impl<T> ExperimentConfig<T> {
    pub fn input(&self, name: &str) -> Result<&Path> {
        self.inputs.get(name).map(PathBuf::as_path).with_context(|| format!("config lacks input '{name}'"))
    }

    pub fn read_input(&self, name: &str) -> Result<String> {
        let p = self.input(name)?;
        std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
    }
}
