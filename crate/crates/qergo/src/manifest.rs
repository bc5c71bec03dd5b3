use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const OUT_DIR_ENV: &str = "QERGO_OUT_DIR";

/// Record of one run. Feeding it back through `--config` repeats the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub workers: usize,
    pub started: String,
    pub finished: String,
    pub pass: bool,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: Option<u64>, workers: usize, started: DateTime<Utc>) -> Self {
        Self {
            command: command.to_string(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            workers,
            started: started.to_rfc3339_opts(SecondsFormat::Millis, true),
            finished: String::new(),
            pass: false,
            outputs: Vec::new(),
        }
    }

    pub fn finish(&mut self, pass: bool, outputs: Vec<PathBuf>) {
        self.finished = Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true);
        self.pass = pass;
        self.outputs = outputs;
    }

    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        let path = dir.join(format!("{}.manifest.json", self.command));
        std::fs::write(&path, serde_json::to_string_pretty(self)? + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Format { path: path.to_path_buf(), message: e.to_string() })
    }
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}
