//! Run manifest: enough provenance to reproduce a run bit-identically —
//! the exact config bytes (by SHA-256), the effective seed, and package
//! versions.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io;
use std::path::Path;

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub versions: Versions,
    pub mask_rate: f64,
    pub wall_seconds: f64,
    pub outputs: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Versions {
    pub package: &'static str,
    pub version: &'static str,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

impl Manifest {
    pub fn write(&self, path: &Path) -> io::Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        std::fs::write(path, text + "\n")
    }
}
