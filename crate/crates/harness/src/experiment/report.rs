//! Recognition reports and their CSV encoding.
//!
//! Two files: per-run detail rows and per-cell aggregates. Real-valued
//! columns use six decimals; an absent `g` is an empty field. Optional
//! preamble lines are written first, each prefixed with `# `.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use znmf_core::PenaltyKind;

use super::ExperimentError;

pub const DETAIL_HEADER: &str = "kind,q,alpha,beta,g,replication,seed,rate";
pub const AGGREGATE_HEADER: &str = "kind,q,alpha,beta,g,mean_rate,std_rate,n";

#[derive(Debug, Clone, PartialEq)]
pub struct DetailRow {
    pub kind: PenaltyKind,
    pub rank: usize,
    pub alpha: f64,
    pub beta: f64,
    pub g: Option<f64>,
    pub replication: usize,
    pub seed: u64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub kind: PenaltyKind,
    pub rank: usize,
    pub alpha: f64,
    pub beta: f64,
    pub g: Option<f64>,
    pub mean_rate: f64,
    /// Sample standard deviation (`n − 1` denominator); zero for one run.
    pub std_rate: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecognitionReport {
    pub details: Vec<DetailRow>,
    pub aggregates: Vec<AggregateRow>,
}

type CellKey = (PenaltyKind, usize, u64, u64, Option<u64>);

fn key(row: &DetailRow) -> CellKey {
    (
        row.kind,
        row.rank,
        row.alpha.to_bits(),
        row.beta.to_bits(),
        row.g.map(f64::to_bits),
    )
}

impl RecognitionReport {
    /// Groups detail rows by cell, keeping cells in first-appearance order.
    pub fn from_details(details: Vec<DetailRow>) -> Self {
        let mut groups: Vec<(CellKey, Vec<usize>)> = Vec::new();
        for (i, row) in details.iter().enumerate() {
            let k = key(row);
            match groups.iter_mut().find(|(gk, _)| *gk == k) {
                Some((_, members)) => members.push(i),
                None => groups.push((k, vec![i])),
            }
        }
        let aggregates = groups
            .into_iter()
            .map(|(_, members)| {
                let first = &details[members[0]];
                let rates: Vec<f64> = members.iter().map(|&i| details[i].rate).collect();
                let (mean_rate, std_rate) = mean_std(&rates);
                AggregateRow {
                    kind: first.kind,
                    rank: first.rank,
                    alpha: first.alpha,
                    beta: first.beta,
                    g: first.g,
                    mean_rate,
                    std_rate,
                    n: rates.len(),
                }
            })
            .collect();
        Self { details, aggregates }
    }
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn real(v: f64) -> String {
    format!("{v:.6}")
}

fn optional(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

fn preamble_lines(preamble: &[String]) -> String {
    preamble.iter().map(|line| format!("# {line}\n")).collect()
}

pub fn detail_csv(report: &RecognitionReport, preamble: &[String]) -> String {
    let mut out = preamble_lines(preamble);
    out.push_str(DETAIL_HEADER);
    out.push('\n');
    for r in &report.details {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.kind,
            r.rank,
            real(r.alpha),
            real(r.beta),
            optional(r.g),
            r.replication,
            r.seed,
            real(r.rate)
        );
    }
    out
}

pub fn aggregate_csv(report: &RecognitionReport, preamble: &[String]) -> String {
    let mut out = preamble_lines(preamble);
    out.push_str(AGGREGATE_HEADER);
    out.push('\n');
    for r in &report.aggregates {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.kind,
            r.rank,
            real(r.alpha),
            real(r.beta),
            optional(r.g),
            real(r.mean_rate),
            real(r.std_rate),
            r.n
        );
    }
    out
}

/// `runs.csv` → `runs_summary.csv`, next to the detail file.
pub fn aggregate_path_for(detail_path: &Path) -> PathBuf {
    let stem = detail_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    let ext = detail_path
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    detail_path.with_file_name(format!("{stem}_summary.{ext}"))
}

/// Writes the detail file at `path` and the aggregate file beside it.
pub fn write_csv(
    report: &RecognitionReport,
    path: &Path,
    preamble: &[String],
) -> Result<(PathBuf, PathBuf), ExperimentError> {
    let summary = aggregate_path_for(path);
    for (target, body) in [
        (path.to_path_buf(), detail_csv(report, preamble)),
        (summary.clone(), aggregate_csv(report, preamble)),
    ] {
        std::fs::write(&target, body).map_err(|source| ExperimentError::Io { path: target, source })?;
    }
    Ok((path.to_path_buf(), summary))
}
