//! Report writing: atomic file replacement and provenance digests.

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::CliError;

/// Writes via a temp file in the target directory plus rename, so a crash
/// never leaves a half-written report and reruns replace files atomically.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let run = || -> anyhow::Result<()> {
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
        if let Some(dir) = dir {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .context("output path has no file name")?;
        let tmp = match dir {
            Some(dir) => dir.join(format!(".{name}.tmp")),
            None => Path::new(&format!(".{name}.tmp")).to_path_buf(),
        };
        std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
        std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
        Ok(())
    };
    run().map_err(CliError::Runtime)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Runtime(e.into()))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Hex SHA-256 over the decimal indices joined by commas; a compact,
/// reproducible fingerprint of a row selection.
pub fn index_digest(indices: &[usize]) -> String {
    let mut hasher = Sha256::new();
    let mut first = true;
    for i in indices {
        if !first {
            hasher.update(b",");
        }
        hasher.update(i.to_string().as_bytes());
        first = false;
    }
    format!("{:x}", hasher.finalize())
}

/// Median of an unsorted score list (mean of the middle pair when even).
pub fn median(scores: &[f64]) -> f64 {
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("scores must not be NaN"));
    let n = sorted.len();
    if n.is_multiple_of(2) {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    } else {
        sorted[n / 2]
    }
}

pub fn mean(scores: &[f64]) -> f64 {
    scores.iter().sum::<f64>() / scores.len() as f64
}
