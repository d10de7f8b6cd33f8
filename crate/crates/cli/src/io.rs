use std::io::Read;

use sha2::{Digest, Sha256};
use waf_core::{Error, MinimalTriple, Result, SurfaceMesh};

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Input reader that records a content hash for every file (or stdin) read.
#[derive(Default)]
pub struct Inputs {
    pub hashes: Vec<(String, String, String)>,
    stdin_used: bool,
}

impl Inputs {
    /// Read `path`, or standard input when `path` is `-`.
    pub fn read(&mut self, role: &str, path: &str) -> Result<String> {
        let text = if path == "-" {
            if self.stdin_used {
                return Err(Error::validation(role, "standard input can feed only one input"));
            }
            self.stdin_used = true;
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::validation("stdin", e.to_string()))?;
            s
        } else {
            std::fs::read_to_string(path).map_err(|e| Error::validation(path, e.to_string()))?
        };
        self.hashes.push((role.to_string(), path.to_string(), sha256_hex(text.as_bytes())));
        Ok(text)
    }

    pub fn mesh(&mut self, path: &str) -> Result<SurfaceMesh> {
        let text = self.read("mesh", path)?;
        SurfaceMesh::from_json(&text).map_err(|e| locate(path, e))
    }

    pub fn triple(&mut self, role: &str, path: &str) -> Result<MinimalTriple> {
        let text = self.read(role, path)?;
        MinimalTriple::from_json(&text).map_err(|e| locate(path, e))
    }
}

/// Prefix the file name onto parse and validation locations.
fn locate(path: &str, e: Error) -> Error {
    match e {
        Error::Validation { location, message } => Error::Validation {
            location: format!("{path}: {location}"),
            message,
        },
        Error::Json(j) => Error::validation(path, j.to_string()),
        other => other,
    }
}
