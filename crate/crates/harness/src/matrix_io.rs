//! Plain comma-separated matrices: one row per line, `#` lines are comments.
//!
//! Values are written with Rust's shortest round-trip formatting, so a
//! matrix read back is bit-identical to the one written.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use znmf_core::DenseMatrix;

pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(f64::to_string).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut values = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("line {}: not a number", lineno + 1))?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                bail!("line {}: expected {c} values, found {}", lineno + 1, row.len())
            }
            _ => {}
        }
        values.extend(row);
        rows += 1;
    }
    let Some(cols) = cols else {
        bail!("no matrix rows found")
    };
    Ok(DenseMatrix::new(rows, cols, values)?)
}

pub fn write_matrix(path: &Path, m: &DenseMatrix) -> Result<()> {
    std::fs::write(path, format_matrix(m)).with_context(|| format!("writing {}", path.display()))
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_matrix(&text).with_context(|| format!("parsing {}", path.display()))
}
