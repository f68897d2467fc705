//! Reproducibility manifests written next to every file artifact.

use mib_core::Result;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// A run record: the command name, its flat parameter map, the seed, and
/// the artifact paths the run wrote. Rerunning the command with these
/// parameters and seed reproduces the artifacts exactly.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    command: String,
    parameters: BTreeMap<String, String>,
    seed: u64,
    artifacts: Vec<String>,
}

impl RunManifest {
    /// Starts a manifest for the named command.
    pub fn new(command: &str, seed: u64) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            seed,
            artifacts: Vec::new(),
        }
    }

    /// Records one parameter.
    pub fn param(mut self, key: &str, value: impl std::fmt::Display) -> RunManifest {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    /// Records one written artifact.
    pub fn artifact(mut self, path: &Path) -> RunManifest {
        self.artifacts.push(path.display().to_string());
        self
    }

    /// Writes the manifest as pretty JSON to `<primary>.manifest.json` and
    /// returns that path.
    pub fn write_beside(&self, primary: &Path) -> Result<PathBuf> {
        let path = crate::util::suffixed(primary, ".manifest.json");
        let json = serde_json::to_string_pretty(self).expect("string maps always serialize");
        std::fs::write(&path, json + "\n")?;
        Ok(path)
    }
}
