//! Command line pipeline: configuration, runs, the acceptance suite and
//! export of run artifacts.

pub mod acceptance;
pub mod config;
pub mod export;
pub mod pipeline;
pub mod verify;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

pub use config::RunConfig;

/// Exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    /// `verify` finished and some criterion failed.
    pub const CRITERIA_FAILED: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const USAGE: i32 = 64;
    pub const NO_INPUT: i32 = 66;
    pub const CANT_CREATE: i32 = 73;
}

/// An error carrying its exit status; printed as JSON on stderr.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, kind: &'static str, message: impl Into<String>) -> Self {
        Self { code, kind, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(exit::USAGE, "usage", message)
    }

    pub fn missing(message: impl Into<String>) -> Self {
        Self::new(exit::NO_INPUT, "missing-input", message)
    }

    pub fn output(path: &Path, e: std::io::Error) -> Self {
        Self::new(exit::CANT_CREATE, "output", format!("{}: {e}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<widom_core::Error> for CliError {
    fn from(e: widom_core::Error) -> Self {
        if e.is_numerical() {
            Self::new(exit::NUMERICAL, "numerical", e.to_string())
        } else {
            Self::new(exit::VALIDATION, "validation", e.to_string())
        }
    }
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::output(dir, e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(|e| CliError::output(&tmp, e))?;
    f.write_all(contents).and_then(|_| f.sync_all()).map_err(|e| CliError::output(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::output(path, e))
}
