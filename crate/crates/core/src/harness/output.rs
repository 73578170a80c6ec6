//! Table and JSON writers, plus the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Writes into one output directory and remembers what it wrote.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    format: Format,
    written: Vec<String>,
}

impl OutputDir {
    /// Creates the directory if needed.
    pub fn create(dir: &Path, format: Format) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            format,
            written: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    /// Rows as `<stem>.csv` or `<stem>.json`, by the chosen format. Missing
    /// optional values become empty CSV fields / JSON nulls.
    pub fn table<T: Serialize>(&mut self, stem: &str, rows: &[T]) -> Result<PathBuf> {
        let name = match self.format {
            Format::Csv => format!("{stem}.csv"),
            Format::Json => format!("{stem}.json"),
        };
        let path = self.dir.join(&name);
        match self.format {
            Format::Csv => {
                let mut w = csv::Writer::from_path(&path)?;
                for r in rows {
                    w.serialize(r)?;
                }
                w.flush()?;
            }
            Format::Json => write_json_file(&path, &rows)?,
        }
        self.written.push(name);
        Ok(path)
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.dir.join(name);
        write_json_file(&path, value)?;
        self.written.push(name.to_string());
        Ok(path)
    }
}

fn write_json_file<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(Error::from)
}

/// Everything needed to rerun: pass the file back via `--config`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub args: Vec<String>,
    pub seed: u64,
    /// Coupling constant q²/(4πε₀ε_rħ) actually used, rad/s·m.
    pub coupling_constant: f64,
    pub config: RunConfig,
    /// Geometry/trap files read in place of the generated ones.
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
}

pub const MANIFEST: &str = "manifest.json";

impl Manifest {
    pub fn new(command: &str, args: Vec<String>, config: &RunConfig) -> Self {
        Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            args,
            seed: config.seed,
            coupling_constant: config.constants().coupling_constant(),
            config: config.clone(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            wall_time_s: 0.0,
        }
    }
}
