//! CSV and JSON emission.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so every
//! value re-parses to the same `f64`. Wall-clock data goes only into
//! `elapsed_s` columns and `run.json`; everything else is a pure function of
//! the configuration.

use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliError;

/// Bumped whenever a CSV header or summary field changes.
pub const SCHEMA_VERSION: u32 = 1;

pub const VERSION: &str = concat!("oppenheim ", env!("CARGO_PKG_VERSION"));

pub fn num(x: f64) -> String {
    format!("{x}")
}

pub struct OutputDir {
    pub path: PathBuf,
}

impl OutputDir {
    /// Create `<out>/<command>` and make sure it is writable.
    pub fn create(cfg: &RunConfig) -> Result<Self, CliError> {
        let path = cfg.out.join(&cfg.command);
        fs::create_dir_all(&path).map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
        let probe = path.join(".write-test");
        File::create(&probe)
            .and_then(|mut f| f.write_all(b""))
            .map_err(|e| CliError::Io(format!("{} is not writable: {e}", path.display())))?;
        let _ = fs::remove_file(&probe);
        Ok(OutputDir { path })
    }

    pub fn csv(&self, name: &str, header: &[&str]) -> Result<CsvSink, CliError> {
        let path = self.path.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        Ok(CsvSink { w, width: header.len(), path })
    }

    /// `summary.json`: command results, the configuration echo and version.
    pub fn summary(&self, cfg: &RunConfig, fields: Value) -> Result<(), CliError> {
        let mut obj = match fields {
            Value::Object(m) => m,
            _ => serde_json::Map::new(),
        };
        obj.insert("config".into(), serde_json::to_value(cfg)?);
        obj.insert("version".into(), json!(VERSION));
        obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
        write_json(&self.path.join("summary.json"), &Value::Object(obj))
    }

    /// `run.json`: worker count and wall time (not reproducible by design).
    pub fn run_info(&self, workers: usize, wall_time_s: f64) -> Result<(), CliError> {
        write_json(
            &self.path.join("run.json"),
            &json!({ "workers": workers, "wall_time_s": wall_time_s, "version": VERSION }),
        )
    }
}

pub fn write_json(path: &Path, v: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub struct CsvSink {
    w: csv::Writer<File>,
    width: usize,
    path: PathBuf,
}

impl CsvSink {
    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        debug_assert_eq!(fields.len(), self.width, "{}", self.path.display());
        self.w.write_record(fields)?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), CliError> {
        self.w.flush().map_err(|e| CliError::Io(format!("{}: {e}", self.path.display())))
    }
}

impl Drop for CsvSink {
    fn drop(&mut self) {
        let _ = self.w.flush();
    }
}
