//! Run manifests written next to every experiment output.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub rng_seed: Option<u64>,
    pub netlist_fingerprint: String,
    pub tool_version: String,
}

impl RunManifest {
    pub fn new(command: &str, netlist_fingerprint: String) -> Self {
        RunManifest {
            command: command.to_string(),
            flags: BTreeMap::new(),
            rng_seed: None,
            netlist_fingerprint,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn flag(mut self, name: &str, value: impl ToString) -> Self {
        self.flags.insert(name.to_string(), value.to_string());
        self
    }

    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        fs::write(dir.join(MANIFEST_FILE), json)?;
        Ok(())
    }

    pub fn read_from_dir(dir: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?)
    }
}
