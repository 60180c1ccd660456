//! Report documents: a command's output plus a mandatory provenance block.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the canonical JSON form of the parsed config.
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    /// Seconds since the Unix epoch; omitted in canonical mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub command: String,
    pub provenance: Provenance,
    pub config: RunConfig,
    pub report: serde_json::Value,
}

pub fn config_hash(config: &RunConfig) -> Result<String> {
    let canonical = serde_json::to_vec(config)?;
    Ok(hex::encode(Sha256::digest(&canonical)))
}

impl ReportFile {
    /// `canonical` drops the timestamp so identical runs are byte-identical.
    pub fn new(
        command: &str,
        config: &RunConfig,
        seed: u64,
        report: serde_json::Value,
        canonical: bool,
    ) -> Result<Self> {
        let timestamp = if canonical {
            None
        } else {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .ok()
                .map(|d| d.as_secs())
        };
        Ok(Self {
            command: command.to_string(),
            provenance: Provenance {
                config_hash: config_hash(config)?,
                seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
                timestamp,
            },
            config: config.clone(),
            report,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
