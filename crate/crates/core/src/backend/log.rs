//! Raw-response log (JSON lines) and the run manifest.
//!
//! The log holds one `RawResponse` per line, UTF-8. The manifest records the
//! run configuration plus instrument and code versions; its content hash
//! stamps every derived artifact. Files are written atomically (temp file in
//! the same directory, then rename).

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{RawResponse, RunConfig};

#[derive(Debug, Error)]
pub enum LogError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {message}")]
    MalformedRecord {
        path: String,
        line: usize,
        message: String,
    },
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn io_err(path: &Path, source: std::io::Error) -> LogError {
    LogError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `content` to `path` atomically.
pub fn write_atomic(path: &Path, content: &[u8]) -> Result<(), LogError> {
    let tmp = path.with_extension("tmp");
    {
        let mut file = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
        file.write_all(content).map_err(|e| io_err(&tmp, e))?;
        file.sync_all().map_err(|e| io_err(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

pub fn write_jsonl(path: &Path, responses: &[RawResponse]) -> Result<(), LogError> {
    let mut buffer = Vec::new();
    for response in responses {
        serde_json::to_writer(&mut buffer, response).expect("RawResponse serializes");
        buffer.push(b'\n');
    }
    write_atomic(path, &buffer)
}

pub fn read_jsonl(path: &Path) -> Result<Vec<RawResponse>, LogError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut responses = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let response: RawResponse =
            serde_json::from_str(&line).map_err(|e| LogError::MalformedRecord {
                path: path.display().to_string(),
                line: i + 1,
                message: e.to_string(),
            })?;
        responses.push(response);
    }
    Ok(responses)
}

/// Run provenance written alongside the raw log.
///
/// Deliberately timestamp-free so that identical configurations hash
/// identically across executions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: RunConfig,
    pub instrument_version: String,
    pub code_version: String,
}

impl RunManifest {
    pub fn new(config: RunConfig, instrument_version: &str) -> Self {
        RunManifest {
            config,
            instrument_version: instrument_version.to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("manifest serializes");
        sha256_hex(json.as_bytes())
    }
}

pub fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<(), LogError> {
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    write_atomic(path, json.as_bytes())
}

pub fn read_manifest(path: &Path) -> Result<RunManifest, LogError> {
    let content = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&content).map_err(|e| LogError::MalformedRecord {
        path: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })
}
