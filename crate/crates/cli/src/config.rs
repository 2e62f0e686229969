//! Experiment configuration files.

use std::path::Path;

use anyhow::{bail, Context};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// `id`, base seed and the experiment's own parameter table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: String,
    pub seed: u64,
    #[serde(default)]
    pub params: toml::Table,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// The parameter table as the experiment's typed parameters.
    pub fn params<P: DeserializeOwned>(&self) -> anyhow::Result<P> {
        toml::Value::Table(self.params.clone()).try_into().with_context(|| format!("invalid parameters for `{}`", self.id))
    }
}

pub fn ensure(condition: bool, what: &str) -> anyhow::Result<()> {
    if !condition {
        bail!("invalid configuration: {what}");
    }
    Ok(())
}
