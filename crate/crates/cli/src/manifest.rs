//! JSON sidecars describing how an output file was produced.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub version: &'static str,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub outputs: Vec<PathBuf>,
    /// SHA-256 of `command` and `params`, identical for identical runs.
    pub config_hash: String,
}

impl RunManifest {
    pub fn new(command: &str, params: serde_json::Value, seed: Option<u64>, outputs: Vec<PathBuf>) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        hasher.update(params.to_string().as_bytes());
        RunManifest {
            command: command.to_string(),
            params,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            outputs,
            config_hash: hex::encode(hasher.finalize()),
        }
    }

    pub fn sidecar_path(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    /// Writes `<output>.manifest.json` next to the first output.
    pub fn write(&self) -> Result<PathBuf, Failure> {
        let first = self
            .outputs
            .first()
            .ok_or_else(|| Failure::Usage("manifest without outputs".into()))?;
        let path = Self::sidecar_path(first);
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        fs::write(&path, text + "\n").map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

/// Writes `text` to `out` with a manifest, or prints it.
pub fn emit(text: &str, out: Option<&Path>, manifest: impl FnOnce(Vec<PathBuf>) -> RunManifest) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            manifest(vec![path.to_path_buf()]).write()?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_time_but_not_params() {
        let a = RunManifest::new("bound", serde_json::json!({"n": 20}), None, vec![]);
        let b = RunManifest::new("bound", serde_json::json!({"n": 20}), None, vec![]);
        let c = RunManifest::new("bound", serde_json::json!({"n": 21}), None, vec![]);
        assert_eq!(a.config_hash, b.config_hash);
        assert_ne!(a.config_hash, c.config_hash);
        assert_eq!(a.config_hash.len(), 64);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            RunManifest::sidecar_path(Path::new("out/d.txt")),
            PathBuf::from("out/d.txt.manifest.json")
        );
    }
}
