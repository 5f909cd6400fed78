//! Columnar binary container for run matrices.
//!
//! Layout (little-endian): magic `CBRM`, format version u32, instance-id
//! string, metadata key-value pairs, row and column counts, then the raw
//! `f64` values row-major. The version gate keeps stale files from being
//! misread after format changes.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use cutbench_core::stats::RunMatrix;

const MAGIC: &[u8; 4] = b"CBRM";
const VERSION: u32 = 1;

fn push_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

pub fn encode(matrix: &RunMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + matrix.values().len() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    push_str(&mut out, matrix.instance());
    out.extend_from_slice(&(matrix.meta().len() as u32).to_le_bytes());
    for (k, v) in matrix.meta() {
        push_str(&mut out, k);
        push_str(&mut out, v);
    }
    out.extend_from_slice(&(matrix.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(matrix.cols() as u64).to_le_bytes());
    for v in matrix.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            bail!("truncated run matrix file");
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        Ok(String::from_utf8(self.take(len)?.to_vec())?)
    }
}

pub fn decode(bytes: &[u8]) -> Result<RunMatrix> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        bail!("not a run matrix file (bad magic)");
    }
    let version = r.u32()?;
    if version != VERSION {
        bail!("unsupported run matrix format version {version} (expected {VERSION})");
    }
    let instance = r.string()?;
    let meta_count = r.u32()? as usize;
    let mut meta = Vec::with_capacity(meta_count);
    for _ in 0..meta_count {
        let k = r.string()?;
        let v = r.string()?;
        meta.push((k, v));
    }
    let rows = r.u64()? as usize;
    let cols = r.u64()? as usize;
    let count = rows
        .checked_mul(cols)
        .context("run matrix dimensions overflow")?;
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(f64::from_le_bytes(r.take(8)?.try_into().unwrap()));
    }
    if r.pos != bytes.len() {
        bail!("trailing bytes after run matrix payload");
    }
    let mut matrix =
        RunMatrix::new(instance, rows, cols, values).map_err(|e| anyhow::anyhow!("{e}"))?;
    for (k, v) in meta {
        matrix.push_meta(k, v);
    }
    Ok(matrix)
}

pub fn write(path: &Path, matrix: &RunMatrix) -> Result<()> {
    crate::csvio::write_atomic(path, &encode(matrix))
}

pub fn read(path: &Path) -> Result<RunMatrix> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    decode(&bytes).with_context(|| format!("decoding {}", path.display()))
}

/// CSV export: one row per run, shots as columns.
pub fn to_csv(matrix: &RunMatrix) -> String {
    let mut csv = crate::csvio::CsvFile::new();
    csv.comment("instance", matrix.instance());
    for (k, v) in matrix.meta() {
        csv.comment(k, v);
    }
    let mut header = vec!["run".to_string()];
    header.extend((1..=matrix.cols()).map(|s| format!("shot_{s}")));
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    csv.header(&header_refs);
    for r in 0..matrix.rows() {
        let mut fields = vec![r.to_string()];
        fields.extend(matrix.row(r).iter().map(|v| crate::csvio::fmt_f64(*v)));
        csv.row(&fields);
    }
    csv.into_text()
}
