//! Run manifest: the scenario, its effective inputs hash, the seed, tool
//! versions, and every artifact with size and digest. No timestamps — a
//! rerun with identical inputs must produce an identical manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub package: &'static str,
    pub config_schema: u32,
}

impl Versions {
    pub fn current() -> Self {
        Self { package: env!("CARGO_PKG_VERSION"), config_schema: 1 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputEntry {
    /// Path relative to the manifest.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub scenario: String,
    pub seed: u64,
    /// Digest of the effective configuration after CLI overrides.
    pub config_sha256: String,
    pub versions: Versions,
    pub outputs: Vec<OutputEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Write `manifest.json` into `dir`, covering `files`. Entries are sorted by
/// relative path so the byte layout does not depend on creation order.
pub fn write_manifest(
    dir: &Path,
    scenario: &str,
    seed: u64,
    config_bytes: &[u8],
    files: &[PathBuf],
) -> Result<PathBuf> {
    let mut outputs = Vec::with_capacity(files.len());
    for file in files {
        let rel = file
            .strip_prefix(dir)
            .map_err(|_| {
                Error::Config {
                    path: "output.dir".into(),
                    message: format!("artifact {} escapes the output directory", file.display()),
                }
            })?
            .to_string_lossy()
            .replace('\\', "/");
        let bytes = fs::read(file)?;
        outputs.push(OutputEntry {
            path: rel,
            bytes: bytes.len() as u64,
            sha256: sha256_hex(&bytes),
        });
    }
    outputs.sort_by(|a, b| a.path.cmp(&b.path));
    let manifest = Manifest {
        scenario: scenario.into(),
        seed,
        config_sha256: sha256_hex(config_bytes),
        versions: Versions::current(),
        outputs,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest)
        .map_err(|e| Error::Domain(format!("manifest: {e}")))?;
    bytes.push(b'\n');
    let path = dir.join(MANIFEST_NAME);
    fs::write(&path, bytes)?;
    Ok(path)
}
