use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use plasmon_cascade::{fmt_float, Settings};
use serde::Serialize;

use crate::Failure;

/// A CSV cell.
pub enum Cell {
    F(f64),
    I(usize),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_float(*x),
            Cell::I(n) => n.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::I(n)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}

/// Output directory plus the record of everything written into it.
pub struct Run {
    dir: PathBuf,
    subcommand: String,
    args: Vec<String>,
    started: Instant,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
    pub settings: Option<Settings>,
    failure: Option<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    arguments: &'a [String],
    status: &'a str,
    error: Option<String>,
    settings: Option<&'a Settings>,
    /// The same settings as config-file text, usable with --config.
    config_text: Option<String>,
    outputs: &'a [String],
    duration_seconds: f64,
    warnings: &'a [String],
}

impl Run {
    pub fn new(dir: &Path, subcommand: &str, args: Vec<String>) -> Result<Self, Failure> {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::Validation(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Run {
            dir: dir.to_path_buf(),
            subcommand: subcommand.to_string(),
            args,
            started: Instant::now(),
            outputs: Vec::new(),
            warnings: Vec::new(),
            settings: None,
            failure: None,
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        debug_assert!(!name.contains('/') && !name.contains('\\'));
        self.outputs.push(name.to_string());
        self.dir.join(name)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<(), Failure> {
        let path = self.path(name);
        fs::write(&path, text).map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))
    }

    pub fn write_csv<R>(&mut self, name: &str, header: &[&str], rows: R) -> Result<(), Failure>
    where
        R: IntoIterator<Item = Vec<Cell>>,
    {
        let path = self.path(name);
        let io = |e: csv::Error| Failure::Validation(format!("cannot write {}: {e}", path.display()));
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        w.write_record(header).map_err(io)?;
        for row in rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))
    }

    pub fn warn(&mut self, items: impl IntoIterator<Item = String>) {
        for w in items {
            if !self.warnings.contains(&w) {
                self.warnings.push(w);
            }
        }
    }

    /// Remembers the first per-point numerical failure so the run can finish
    /// writing before it reports.
    pub fn pending_failure(&mut self, failure: Option<String>) {
        if self.failure.is_none() {
            self.failure = failure;
        }
    }

    pub fn take_failure(&mut self) -> Result<(), Failure> {
        match self.failure.take() {
            Some(m) => Err(Failure::Numerical(m)),
            None => Ok(()),
        }
    }

    /// Writes manifest.json; called on success and on failure alike.
    pub fn finish(mut self, outcome: &Result<(), Failure>) -> Result<(), Failure> {
        self.outputs.push("manifest.json".into());
        let error = outcome.as_ref().err().map(|f| f.to_string());
        let manifest = Manifest {
            tool: env!("CARGO_BIN_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: &self.subcommand,
            arguments: &self.args,
            status: if outcome.is_ok() { "ok" } else { "error" },
            error,
            settings: self.settings.as_ref(),
            config_text: self.settings.as_ref().map(Settings::to_text),
            outputs: &self.outputs,
            duration_seconds: self.started.elapsed().as_secs_f64(),
            warnings: &self.warnings,
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        let path = self.dir.join("manifest.json");
        fs::write(&path, text + "\n").map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))
    }
}
