//! Report assembly: content digests, fixed-precision rounding, and
//! deterministic file output.
//!
//! Per-field precision (documented contract for cross-platform
//! comparability): frequencies 6 decimals (THz), photon rates 3 decimals,
//! QBER and phases 9 decimals, dB values 3 decimals, times in seconds
//! 9 decimals, picosecond values are integers.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const TOOL_NAME: &str = "coexist-sim";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn round3(x: f64) -> f64 {
    if x.abs() >= 1e15 {
        x
    } else {
        (x * 1e3).round() / 1e3
    }
}

pub fn round6(x: f64) -> f64 {
    coexist_core::scenario::round6(x)
}

pub fn round9(x: f64) -> f64 {
    if x.abs() >= 1e9 {
        x
    } else {
        (x * 1e9).round() / 1e9
    }
}

/// SHA-256 of in-memory bytes, hex encoded.
pub fn bytes_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Common report envelope. `inputs` names the files the run consumed with
/// their digests; `effective` echoes the resolved configuration.
pub fn envelope(command: &str, inputs: Value, effective: Value, result: Value) -> Value {
    json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": command,
        "inputs": inputs,
        "effective": effective,
        "result": result,
    })
}

/// Write a report or data file and print its path.
pub fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(path)
}

/// Serialize a JSON report with a trailing newline.
pub fn to_json_bytes(value: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s.into_bytes()
}
