use std::collections::BTreeMap;
use std::path::Path;

use polychan_core::config::short_hash;
use serde::Serialize;

use crate::{write_text, CliResult};

/// Record of one command run. The hash covers everything that determines
/// the outputs and nothing else: wall-clock time and thread count are left
/// out, so reruns with the same inputs reproduce it.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params_hash: String,
    pub grid_sizes: Vec<usize>,
    pub tolerances: BTreeMap<String, f64>,
    /// Output file names, relative to the output directory.
    pub outputs: Vec<String>,
    pub tool_version: String,
    pub wall_clock_seconds: f64,
    pub hash: String,
}

#[derive(Serialize)]
struct Hashed<'a> {
    command: &'a str,
    params_hash: &'a str,
    grid_sizes: &'a [usize],
    tolerances: &'a BTreeMap<String, f64>,
    outputs: &'a [String],
    tool_version: &'a str,
}

impl RunManifest {
    pub fn new(
        command: &str,
        params_hash: String,
        grid_sizes: Vec<usize>,
        tolerances: BTreeMap<String, f64>,
        outputs: Vec<String>,
    ) -> Self {
        let tool_version = env!("CARGO_PKG_VERSION").to_string();
        let hashed = Hashed {
            command,
            params_hash: &params_hash,
            grid_sizes: &grid_sizes,
            tolerances: &tolerances,
            outputs: &outputs,
            tool_version: &tool_version,
        };
        let hash = short_hash(serde_json::to_string(&hashed).expect("manifest serializes").as_bytes());
        RunManifest {
            command: command.to_string(),
            params_hash,
            grid_sizes,
            tolerances,
            outputs,
            tool_version,
            wall_clock_seconds: 0.0,
            hash,
        }
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes") + "\n";
        write_text(&dir.join("manifest.json"), &text)
    }
}
