use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bayes::McmcConfig;
use crate::error::{Error, Result};
use crate::pauli::CommutationMode;

/// Run configuration. Missing JSON fields take the defaults below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunSettings {
    pub mode: CommutationMode,
    pub adaptive: bool,
    /// Total shot budget `M`, probes included.
    pub budget: u64,
    /// Shots per batch; `max(1, M/100)` when unset.
    pub batch_size: Option<u64>,
    /// Pair covariances are refreshed every this many batches.
    pub refresh_every: usize,
    pub noise_aware: bool,
    /// Fraction of every batch spent on stabilizer probes when noise-aware.
    pub probe_split: f64,
    pub seed: u64,
    pub mcmc: McmcConfig,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            mode: CommutationMode::General,
            adaptive: true,
            budget: 1000,
            batch_size: None,
            refresh_every: 5,
            noise_aware: false,
            probe_split: 0.5,
            seed: 0,
            mcmc: McmcConfig::default(),
        }
    }
}

impl RunSettings {
    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidSetting("budget must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.probe_split) {
            return Err(Error::InvalidSetting(format!("probe split {} outside [0, 1)", self.probe_split)));
        }
        if self.batch_size == Some(0) {
            return Err(Error::InvalidSetting("batch size must be at least 1".into()));
        }
        if self.refresh_every == 0 {
            return Err(Error::InvalidSetting("refresh cadence must be at least 1".into()));
        }
        Ok(())
    }

    pub fn batch(&self) -> u64 {
        self.batch_size.unwrap_or((self.budget / 100).max(1))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let s: Self = serde_json::from_str(&text).map_err(|source| Error::Parse {
            path: path.display().to_string(),
            source,
        })?;
        s.validate()?;
        Ok(s)
    }
}
