//! The run manifest: config hash, input digests, artifact list and
//! timings, updated after every command. Everything a command writes is
//! listed here; timings are informational and the only part that varies
//! between identical reruns.

use crate::ForgeError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

pub const MANIFEST_FILE: &str = "run_manifest.json";

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub input_digests: BTreeMap<String, String>,
    pub artifacts: BTreeSet<String>,
    pub timings_ms: BTreeMap<String, u64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_file(path: &Path) -> Result<String, ForgeError> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

impl RunManifest {
    pub fn load_or_default(output_dir: &Path) -> Self {
        std::fs::read_to_string(output_dir.join(MANIFEST_FILE))
            .ok()
            .and_then(|text| serde_json::from_str(&text).ok())
            .unwrap_or_default()
    }

    pub fn record_input(&mut self, name: &str, path: &Path) -> Result<(), ForgeError> {
        self.input_digests
            .insert(name.to_string(), digest_file(path)?);
        Ok(())
    }

    pub fn record_artifact(&mut self, name: &str) {
        self.artifacts.insert(name.to_string());
    }

    pub fn record_timing(&mut self, command: &str, millis: u64) {
        self.timings_ms.insert(command.to_string(), millis);
    }

    pub fn save(&self, output_dir: &Path) -> Result<(), ForgeError> {
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        std::fs::write(output_dir.join(MANIFEST_FILE), json)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        // sha256 of the empty string.
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn manifest_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::default();
        m.config_hash = sha256_hex(b"cfg");
        m.record_artifact("a.jsonl");
        m.record_timing("ingest", 12);
        m.save(dir.path()).unwrap();
        let loaded = RunManifest::load_or_default(dir.path());
        assert_eq!(loaded.config_hash, m.config_hash);
        assert!(loaded.artifacts.contains("a.jsonl"));
    }

    #[test]
    fn missing_manifest_is_default() {
        let dir = tempfile::tempdir().unwrap();
        let m = RunManifest::load_or_default(dir.path());
        assert!(m.artifacts.is_empty());
    }
}
