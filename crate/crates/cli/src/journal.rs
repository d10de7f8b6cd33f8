use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use waf_core::{Error, Result};

pub const JOURNAL_ENV: &str = "WAF_JOURNAL";
const DEFAULT_NAME: &str = "waf-journal.jsonl";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InputHash {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

/// One journal line. Everything except `timestamp`, `wall_time_s` and `argv`
/// is a function of the command, its inputs and its parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub input_hashes: Vec<InputHash>,
    pub parameters: Value,
    pub outputs: Value,
    pub exit_code: i32,
    pub timestamp: String,
    pub tool_version: String,
    pub wall_time_s: f64,
    pub argv: Vec<String>,
}

/// `--journal` flag, then the environment variable, then the output
/// directory, then the working directory.
pub fn resolve_path(flag: Option<&Path>, out: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(JOURNAL_ENV).filter(|p| !p.is_empty()) {
        return PathBuf::from(p);
    }
    match out {
        Some(dir) => dir.join(DEFAULT_NAME),
        None => PathBuf::from(DEFAULT_NAME),
    }
}

pub fn append(path: &Path, record: &RunRecord) -> Result<()> {
    let line = serde_json::to_string(record)?;
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::validation(path.display().to_string(), e.to_string()))?;
    writeln!(file, "{line}").map_err(|e| Error::validation(path.display().to_string(), e.to_string()))
}

pub fn load(path: &Path) -> Result<Vec<RunRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::validation(path.display().to_string(), e.to_string()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::validation(format!("{}:{}", path.display(), i + 1), e.to_string()))
        })
        .collect()
}
