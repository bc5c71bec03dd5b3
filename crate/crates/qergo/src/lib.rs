//! File formats, run manifests and command bodies around `qergo-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod report;

use std::path::Path;

use serde::Serialize;

pub use error::{CliError, CliResult};
pub use manifest::RunManifest;
pub use report::{Check, Report};

/// Runs a command body, then writes its manifest next to the outputs.
pub fn execute<C: Serialize>(
    command: &str,
    cfg: &C,
    seed: Option<u64>,
    workers: usize,
    out_dir: &Path,
    body: impl FnOnce(&C, &Path) -> CliResult<Report>,
) -> CliResult<(Report, std::path::PathBuf)> {
    manifest::ensure_dir(out_dir)?;
    let mut m = RunManifest::new(command, serde_json::to_value(cfg)?, seed, workers, chrono::Utc::now());
    let report = body(cfg, out_dir)?;
    m.finish(report.pass, report.outputs.clone());
    let path = m.write(out_dir)?;
    Ok((report, path))
}
