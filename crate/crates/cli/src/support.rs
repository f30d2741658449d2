//! Shared command plumbing: the error-to-exit-code contract, the run
//! manifest embedded in every artifact, unit-suffix parsing for flags, and
//! atomic file I/O.

use std::fmt::{self, Display};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Failure classes with a stable exit-code contract: usage/config problems
/// exit 2, I/O failures exit 3, analysis failures exit 4.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Analysis(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Analysis(_) => 4,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) | CliError::Io(msg) | CliError::Analysis(msg) => {
                f.write_str(msg)
            }
        }
    }
}

/// What produced an artifact: the command, every path it touched, the seed
/// it ran under, and the tool version. Serialized verbatim into each output,
/// as a `# manifest=...` comment in CSVs or a `"manifest"` key in JSON.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            config: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn config(mut self, path: &Path) -> Self {
        self.config.push(path.display().to_string());
        self
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.display().to_string());
        self
    }

    pub fn inputs(mut self, paths: &[PathBuf]) -> Self {
        for p in paths {
            self.inputs.push(p.display().to_string());
        }
        self
    }

    pub fn output(mut self, path: &Path) -> Self {
        self.outputs.push(path.display().to_string());
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// One-line JSON form, safe to carry as a `key=value` comment.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }
}

/// Key under which the manifest rides in CSV comments and JSON objects.
pub const MANIFEST_KEY: &str = "manifest";

pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

/// Write via a sibling temp file and rename, so readers never observe a
/// partial artifact.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| CliError::Io(format!("cannot rename {} into place: {e}", tmp.display())))
}

fn parse_suffixed(s: &str, suffixes: &[(&str, f64)], bare: f64, what: &str) -> Result<f64, String> {
    let trimmed = s.trim();
    let lower = trimmed.to_ascii_lowercase();
    let (digits, scale) = suffixes
        .iter()
        .find_map(|&(suf, scale)| lower.strip_suffix(suf).map(|d| (d, scale)))
        .unwrap_or((lower.as_str(), bare));
    let value: f64 = digits
        .trim_end()
        .parse()
        .map_err(|_| format!("cannot parse {what} {trimmed:?}"))?;
    if !(value.is_finite() && value >= 0.0) {
        return Err(format!("{what} must be finite and non-negative, got {trimmed:?}"));
    }
    Ok(value * scale)
}

/// Duration flag in seconds; accepts `us`, `ms`, and `s` suffixes
/// (`10us` -> 1e-5). Bare numbers are seconds.
pub fn parse_duration_s(s: &str) -> Result<f64, String> {
    parse_suffixed(s, &[("us", 1e-6), ("ms", 1e-3), ("s", 1.0)], 1.0, "duration")
}

/// Frequency flag in MHz; accepts `MHz` and `GHz` suffixes (`1.2GHz` ->
/// 1200). Bare numbers are MHz.
pub fn parse_freq_mhz(s: &str) -> Result<f64, String> {
    parse_suffixed(s, &[("mhz", 1.0), ("ghz", 1e3)], 1.0, "frequency")
}

// ============================================================================
