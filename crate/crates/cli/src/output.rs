//! CSV tables and the JSON run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliResult;

/// Collects what a run produced and writes `<command>.manifest.json`.
pub struct Run {
    command: &'static str,
    dir: PathBuf,
    started: Instant,
    parameters: Value,
    outputs: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    parameters: &'a Value,
    outputs: &'a [String],
    elapsed_seconds: f64,
    passed: Option<bool>,
    results: Value,
}

impl Run {
    pub fn start(command: &'static str, dir: &Path, parameters: impl Serialize) -> CliResult<Self> {
        fs::create_dir_all(dir)?;
        Ok(Run {
            command,
            dir: dir.to_path_buf(),
            started: Instant::now(),
            parameters: serde_json::to_value(parameters)?,
            outputs: Vec::new(),
        })
    }

    /// Writes serializable rows to `<dir>/<name>` and records the file.
    pub fn table<R: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = R>) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    pub fn finish(self, passed: Option<bool>, results: impl Serialize) -> CliResult<PathBuf> {
        let manifest = Manifest {
            tool: "magbr",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            parameters: &self.parameters,
            outputs: &self.outputs,
            elapsed_seconds: self.started.elapsed().as_secs_f64(),
            passed,
            results: serde_json::to_value(results)?,
        };
        let path = self.dir.join(format!("{}.manifest.json", self.command));
        fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
        Ok(path)
    }
}
