//! Readers and writers for every artifact the tool emits. Each writer is
//! deterministic and each reader accepts exactly what its writer produces.

pub mod dataset;
pub mod network;
pub mod profile;
pub mod sessions;
pub mod trace;

use std::fs;
use std::path::Path;

use crate::{CliError, Result};

pub(crate) fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub(crate) fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Pretty JSON with a trailing newline.
pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory JSON serialization");
    s.push('\n');
    s
}
