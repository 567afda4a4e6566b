//! Report envelope: every command's JSON output embeds the manifest that
//! produced it, so a report can be reproduced bit-for-bit (the wall-clock
//! duration is the one field outside the reproducibility contract, and sits
//! on its own line).

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// Semantic flags with their resolved values. Execution details that
    /// cannot change report content (--threads, --out, --csv) are excluded
    /// so reports stay byte-identical across worker counts.
    pub flags: BTreeMap<String, String>,
    pub seed: u64,
    pub version: String,
    /// sha256 of every input file read, keyed by the path as given.
    pub input_digests: BTreeMap<String, String>,
}

#[derive(Debug, Serialize)]
pub struct Envelope {
    pub schema_version: u32,
    pub manifest: RunManifest,
    pub duration_ms: u128,
    pub report: serde_json::Value,
}

pub fn file_digest(path: &Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("sha256:{:x}", hasher.finalize()))
}

pub fn manifest(
    command: &str,
    seed: u64,
    flags: BTreeMap<String, String>,
    input_digests: BTreeMap<String, String>,
) -> RunManifest {
    RunManifest {
        command: command.to_string(),
        flags,
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        input_digests,
    }
}
