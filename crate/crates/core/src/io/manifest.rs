use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::IoError;

/// Provenance record written next to every output file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub code_version: String,
    pub seed: Option<u64>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    /// SHA-256 hex digest of each output, keyed by file name.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, arguments: Vec<String>, seed: Option<u64>) -> Self {
        Self {
            command: command.into(),
            arguments,
            code_version: env!("CARGO_PKG_VERSION").into(),
            seed,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            outputs: BTreeMap::new(),
        }
    }

    pub fn record_output(&mut self, name: &str, bytes: &[u8]) {
        self.outputs.insert(name.into(), sha256_hex(bytes));
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes via a temporary file in the target directory, then renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let fail = |message: String| IoError::Write {
        path: path.to_path_buf(),
        message,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(e.to_string()))?;
    tmp.write_all(bytes).map_err(|e| fail(e.to_string()))?;
    tmp.as_file().sync_all().map_err(|e| fail(e.to_string()))?;
    tmp.persist(path).map_err(|e| fail(e.error.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_and_atomic_write() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);

        let mut m = RunManifest::new("census", vec!["--limit".into(), "3".into()], Some(7));
        m.record_output("out.txt", b"second");
        let back: RunManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
