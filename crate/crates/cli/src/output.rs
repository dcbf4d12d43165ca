//! Buffered result files, written only once a command has finished.

use anyhow::{Context, Result};
use std::path::{Path, PathBuf};

/// Files produced by one command, held in memory until [`Outputs::commit`].
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
    trailer: String,
}

impl Outputs {
    /// `trailer` is appended to every CSV as a `#` comment line.
    pub fn new(config_hash: &str, seed: u64) -> Self {
        Self { files: Vec::new(), trailer: format!("# config_hash={config_hash},seed={seed}\n") }
    }

    /// Builds a CSV from a header and rows, then adds the metadata line.
    pub fn csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?;
        self.csv_bytes(name, bytes);
        Ok(())
    }

    /// Adds an already-rendered CSV and appends the metadata line.
    pub fn csv_bytes(&mut self, name: &str, mut bytes: Vec<u8>) {
        bytes.extend_from_slice(self.trailer.as_bytes());
        self.files.push((name.to_string(), bytes));
    }

    pub fn raw(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    /// Writes every file under `dir`, creating it if needed.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut written = Vec::new();
        for (name, bytes) in self.files {
            let p = dir.join(name);
            std::fs::write(&p, bytes).with_context(|| format!("writing {}", p.display()))?;
            written.push(p);
        }
        Ok(written)
    }
}

/// Formats an optional number; missing values become empty cells.
pub fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}
