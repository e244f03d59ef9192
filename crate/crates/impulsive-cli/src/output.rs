//! Output plumbing: version/config stamps, deterministic number formatting,
//! and stamped CSV/JSON writers.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use impulsive::{Error, Result};

/// Default output directory when a relative path is given.
pub const OUT_DIR_ENV: &str = "IMPULSIVE_OUT_DIR";

/// Version plus a stable hash of the effective configuration; embedded in
/// every output file so results can be traced back to their run.
pub struct OutputStamp {
    pub version: &'static str,
    pub hash: String,
}

impl OutputStamp {
    pub fn new<C: Serialize>(config: &C) -> Result<Self> {
        let canonical = serde_json::to_string(config)
            .map_err(|e| Error::InvalidConfig(format!("config serialize: {e}")))?;
        Ok(OutputStamp {
            version: env!("CARGO_PKG_VERSION"),
            hash: format!("{:016x}", fnv1a(canonical.as_bytes())),
        })
    }
}

/// 64-bit FNV-1a; stable across platforms and runs.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Resolve a possibly-relative output path against `IMPULSIVE_OUT_DIR`.
pub fn resolve(path: &str) -> PathBuf {
    let p = PathBuf::from(path);
    if p.is_absolute() {
        return p;
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(p),
        None => p,
    }
}

/// Twelve significant digits, locale-free.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    format!("{x:.11e}")
}

/// CSV writer with leading comment lines carrying the stamp.
pub fn csv_writer(path: &Path, stamp: &OutputStamp, system: &str) -> Result<csv::Writer<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::numerical(format!("mkdir {}: {e}", parent.display())))?;
        }
    }
    let mut file = File::create(path)
        .map_err(|e| Error::numerical(format!("create {}: {e}", path.display())))?;
    writeln!(file, "# impulsive {}", stamp.version)
        .and_then(|_| writeln!(file, "# config_hash={}", stamp.hash))
        .and_then(|_| writeln!(file, "# system={system}"))
        .map_err(|e| Error::numerical(format!("write {}: {e}", path.display())))?;
    Ok(csv::WriterBuilder::new().from_writer(file))
}

/// Pretty JSON with the trailing newline; ancestors created as needed.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::numerical(format!("mkdir {}: {e}", parent.display())))?;
        }
    }
    let body = serde_json::to_string_pretty(value)
        .map_err(|e| Error::numerical(format!("json serialize: {e}")))?;
    std::fs::write(path, body + "\n")
        .map_err(|e| Error::numerical(format!("write {}: {e}", path.display())))
}
