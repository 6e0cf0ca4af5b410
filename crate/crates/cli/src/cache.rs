//! On-disk result cache: one JSON file per `(command, r)`, keyed by a hash of the
//! settings that affect the result and by the crate version.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Serialize, Deserialize)]
struct Entry<T> {
    version: String,
    command: String,
    r: i64,
    config_hash: String,
    report: T,
}

/// Hex SHA-256 of the `key=value` pairs, in the given order.
pub fn config_hash(parts: &[(&str, String)]) -> String {
    let mut hasher = Sha256::new();
    for (k, v) in parts {
        hasher.update(k.as_bytes());
        hasher.update(b"=");
        hasher.update(v.as_bytes());
        hasher.update(b";");
    }
    hex::encode(hasher.finalize())
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
        }
    }

    fn path(&self, command: &str, r: i64) -> PathBuf {
        self.dir.join(format!("{command}-r{r}.json"))
    }

    /// The cached report, if present and written by this version with this config.
    pub fn get<T: DeserializeOwned>(&self, command: &str, r: i64, hash: &str) -> Option<T> {
        let text = fs::read_to_string(self.path(command, r)).ok()?;
        let entry: Entry<T> = serde_json::from_str(&text).ok()?;
        (entry.version == VERSION && entry.command == command && entry.r == r && entry.config_hash == hash)
            .then_some(entry.report)
    }

    pub fn put<T: Serialize>(&self, command: &str, r: i64, hash: &str, report: &T) -> Result<(), CliError> {
        fs::create_dir_all(&self.dir)?;
        let entry = Entry {
            version: VERSION.to_string(),
            command: command.to_string(),
            r,
            config_hash: hash.to_string(),
            report,
        };
        let target = self.path(command, r);
        let temp = self.dir.join(format!(
            ".{command}-r{r}.{}.{}.tmp",
            std::process::id(),
            TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        fs::write(&temp, serde_json::to_vec_pretty(&entry)?)?;
        fs::rename(&temp, &target)?;
        Ok(())
    }
}

/// Looks the report up in `cache` or computes and stores it.
pub fn cached<T, F>(
    cache: Option<&Cache>,
    command: &str,
    r: i64,
    hash: &str,
    compute: F,
) -> Result<T, CliError>
where
    T: Serialize + DeserializeOwned,
    F: FnOnce() -> Result<T, CliError>,
{
    if let Some(hit) = cache.and_then(|c| c.get(command, r, hash)) {
        return Ok(hit);
    }
    let report = compute()?;
    if let Some(c) = cache {
        c.put(command, r, hash, &report)?;
    }
    Ok(report)
}
