//! Run manifests: what was run, with which seed, and the hash of every output.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::Result;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Relative to the run directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub timestamp: String,
    pub kind: String,
    pub code_version: String,
    pub seed: Option<u64>,
    pub rng: Option<String>,
    /// The configuration as parsed, including defaults.
    pub config: serde_json::Value,
    pub config_sha256: String,
    /// False when the run stopped early (blow-up); outputs are partial.
    pub complete: bool,
    pub exit_code: i32,
    pub outputs: Vec<OutputFile>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

impl RunManifest {
    pub fn new(
        kind: &str,
        config: serde_json::Value,
        seed: Option<u64>,
        rng: Option<&str>,
    ) -> Self {
        let config_sha256 = sha256_hex(config.to_string().as_bytes());
        let now = chrono::Utc::now();
        Self {
            run_id: format!(
                "{}-{}-{}",
                kind,
                now.format("%Y%m%dT%H%M%S%.3fZ"),
                &config_sha256[..8]
            ),
            timestamp: now.to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            kind: kind.into(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            seed,
            rng: rng.map(Into::into),
            config,
            config_sha256,
            complete: true,
            exit_code: 0,
            outputs: Vec::new(),
        }
    }

    /// Hashes `dir/rel` and records it, replacing an earlier entry for the same path.
    pub fn record(&mut self, dir: &Path, rel: &str) -> Result<()> {
        let bytes = std::fs::read(dir.join(rel))?;
        let entry = OutputFile {
            path: rel.into(),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len() as u64,
        };
        match self.outputs.iter_mut().find(|o| o.path == rel) {
            Some(o) => *o = entry,
            None => self.outputs.push(entry),
        }
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let p = dir.join(MANIFEST_FILE);
        std::fs::write(&p, serde_json::to_string_pretty(self)?)?;
        Ok(p)
    }

    pub fn read(dir: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(
            dir.join(MANIFEST_FILE),
        )?)?)
    }

    /// Checks that every listed output exists and matches its hash.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        for o in &self.outputs {
            let p = dir.join(&o.path);
            let h = sha256_file(&p).map_err(|e| Error::Precondition(format!("{}: {e}", o.path)))?;
            if h != o.sha256 {
                return Err(Error::Precondition(format!(
                    "{} does not match its recorded hash",
                    o.path
                )));
            }
        }
        Ok(())
    }
}
