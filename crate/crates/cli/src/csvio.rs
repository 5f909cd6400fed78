//! Comment-preamble CSV writing and reading.
//!
//! Every produced file starts with `#`-prefixed metadata lines (toolkit
//! version, config hash, seeds, stage parameters), then a header row, then
//! data. Floats are written with the shortest representation that parses
//! back to the same value, so identical inputs yield identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Builder for one output file.
pub struct CsvFile {
    text: String,
}

impl CsvFile {
    pub fn new() -> Self {
        Self {
            text: String::new(),
        }
    }

    pub fn comment(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        let _ = writeln!(self.text, "# {key} = {value}");
        self
    }

    pub fn header(&mut self, columns: &[&str]) -> &mut Self {
        let _ = writeln!(self.text, "{}", columns.join(","));
        self
    }

    pub fn row(&mut self, fields: &[String]) -> &mut Self {
        let _ = writeln!(self.text, "{}", fields.join(","));
        self
    }

    pub fn into_text(self) -> String {
        self.text
    }

    /// Write atomically: a `.part` file is renamed into place on success,
    /// so an aborted stage leaves only `.part` markers behind.
    pub fn write(self, path: &Path) -> Result<()> {
        write_atomic(path, self.text.as_bytes())
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let mut part = path.as_os_str().to_owned();
    part.push(".part");
    let part = std::path::PathBuf::from(part);
    fs::write(&part, bytes).with_context(|| format!("writing {}", part.display()))?;
    fs::rename(&part, path).with_context(|| format!("finalizing {}", path.display()))?;
    Ok(())
}

/// Shortest round-trip float rendering.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// A parsed CSV: preamble comments and rows keyed by header.
pub struct CsvData {
    pub comments: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvData {
    pub fn read(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut comments = Vec::new();
        let mut header: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    comments.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
            match &header {
                None => header = Some(fields),
                Some(_) => rows.push(fields),
            }
        }
        let header = header.with_context(|| format!("{} has no header row", path.display()))?;
        Ok(Self {
            comments,
            header,
            rows,
        })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        match self.header.iter().position(|h| h == name) {
            Some(idx) => Ok(idx),
            None => bail!("missing column {name:?} (have {:?})", self.header),
        }
    }

    pub fn f64_at(&self, row: usize, col: usize) -> Result<f64> {
        let field = &self.rows[row][col];
        field
            .parse()
            .with_context(|| format!("field {field:?} is not a number"))
    }
}
