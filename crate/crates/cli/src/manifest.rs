//! Run manifests: enough to re-run a command and check its outputs.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::cache::sha256_hex;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, as given.
    pub arguments: Vec<String>,
    pub version: String,
    pub cache_dir: String,
    pub cache_keys: Vec<String>,
    /// Seconds, keyed by step.
    pub wall_times: BTreeMap<String, f64>,
    /// SHA-256 of each output, keyed by output name (`stdout` or a file name).
    pub output_digests: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, arguments: Vec<String>) -> Self {
        RunManifest {
            command: command.to_string(),
            arguments,
            version: TOOL_VERSION.to_string(),
            ..RunManifest::default()
        }
    }

    pub fn record_output(&mut self, name: &str, bytes: &[u8]) {
        self.output_digests.insert(name.to_string(), sha256_hex(bytes));
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json + "\n").with_context(|| format!("writing manifest {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }

    /// Names of outputs whose digest differs from `other`'s.
    pub fn mismatched_outputs(&self, other: &RunManifest) -> Vec<String> {
        self.output_digests
            .iter()
            .filter(|(k, v)| other.output_digests.get(*k) != Some(v))
            .map(|(k, _)| k.clone())
            .collect()
    }
}
