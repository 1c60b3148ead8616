//! Run manifests written next to every CLI output.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::io::write_text;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    /// SHA-256 over the arguments and the contents of every input file.
    pub config_hash: String,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub wall_ms: f64,
    pub outputs: Vec<PathBuf>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Hashes the argument list (NUL separated) followed by each input's bytes.
pub fn config_hash(args: &[String], inputs: &[Vec<u8>]) -> String {
    let mut h = Sha256::new();
    for a in args {
        h.update(a.as_bytes());
        h.update([0u8]);
    }
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

/// `out.json` → `out.json.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

impl RunManifest {
    pub fn write_next_to(&self, out: &Path) -> Result<PathBuf> {
        let path = manifest_path(out);
        write_text(&path, &serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_on_args_and_inputs() {
        let a = vec!["solve".to_string(), "x.json".to_string()];
        let h1 = config_hash(&a, &[b"{}".to_vec()]);
        assert_eq!(h1.len(), 64);
        assert_eq!(h1, config_hash(&a, &[b"{}".to_vec()]));
        assert_ne!(h1, config_hash(&a, &[b"{ }".to_vec()]));
        let b = vec!["solvex.json".to_string()];
        assert_ne!(h1, config_hash(&b, &[b"{}".to_vec()]));
    }

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(
            manifest_path(Path::new("/tmp/sol.json")),
            PathBuf::from("/tmp/sol.json.manifest.json")
        );
    }
}
