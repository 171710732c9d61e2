//! Run manifests and output files.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

/// Record of one invocation, written next to every output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub arguments: Vec<String>,
    pub config_path: String,
    pub overrides: Vec<(String, String)>,
    /// Resolved configuration, in the units named by the keys.
    pub parameters: Map<String, Value>,
    pub outputs: Vec<String>,
    /// `SOURCE_DATE_EPOCH` when set, so repeated runs stay byte-identical.
    pub timestamp: String,
    pub results: Map<String, Value>,
    pub warnings: Vec<String>,
}

pub fn timestamp() -> String {
    std::env::var("SOURCE_DATE_EPOCH").unwrap_or_else(|_| "unspecified".into())
}

/// Sidecar path for an output file: `<out>.manifest.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// How the manifest is referred to from inside the output.
pub fn reference(out: Option<&Path>) -> String {
    match out {
        Some(p) => sidecar_path(p)
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        None => "stderr".into(),
    }
}

pub fn split_override(text: &str) -> (String, String) {
    match text.split_once('=') {
        Some((k, v)) => (k.trim().to_owned(), v.trim().to_owned()),
        None => (text.trim().to_owned(), String::new()),
    }
}
