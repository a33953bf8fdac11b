//! Result rows and their CSV encoding.

use std::io::{Read, Write};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// One algorithm run on one instance. Column order is fixed; `lp_bound`/`wctr` are empty when
/// the LP failed and `wct` when the algorithm did.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub algorithm: String,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub wct: Option<f64>,
    pub lp_bound: Option<f64>,
    pub wctr: Option<f64>,
    pub runtime_ms: f64,
    pub status: String,
    pub sweep_param: String,
    pub sweep_value: Option<f64>,
}

pub const STATUS_OK: &str = "ok";
pub const STATUS_LP_FAILED: &str = "lp_failed";
pub const STATUS_FAILED: &str = "failed";

pub fn write_records(w: impl Write, records: &[RunRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    if records.is_empty() {
        out.write_record([
            "instance_id", "algorithm", "m", "n", "seed", "wct", "lp_bound", "wctr", "runtime_ms", "status",
            "sweep_param", "sweep_value",
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records(r: impl Read) -> Result<Vec<RunRecord>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .enumerate()
        .map(|(k, row)| row.with_context(|| format!("record {}", k + 1)))
        .collect()
}

/// Mean and sample standard deviation of the WCTR of one (sweep point, algorithm) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub sweep_param: String,
    pub sweep_value: Option<f64>,
    pub algorithm: String,
    pub runs: usize,
    pub failed: usize,
    pub mean_wctr: Option<f64>,
    pub std_wctr: Option<f64>,
    pub mean_runtime_ms: f64,
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

/// Groups records by sweep point and algorithm; algorithms keep their first-seen order.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut algos: Vec<&str> = Vec::new();
    for r in records {
        if !algos.contains(&r.algorithm.as_str()) {
            algos.push(&r.algorithm);
        }
    }
    let rank = |r: &RunRecord| algos.iter().position(|a| *a == r.algorithm).unwrap_or(usize::MAX);
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        a.sweep_param
            .cmp(&b.sweep_param)
            .then(a.sweep_value.unwrap_or(f64::NEG_INFINITY).total_cmp(&b.sweep_value.unwrap_or(f64::NEG_INFINITY)))
            .then(rank(a).cmp(&rank(b)))
    });
    sorted
        .chunk_by(|a, b| a.sweep_param == b.sweep_param && a.sweep_value == b.sweep_value && a.algorithm == b.algorithm)
        .map(|rows| {
            let ratios: Vec<f64> = rows.iter().filter_map(|r| r.wctr).collect();
            let stats = (!ratios.is_empty()).then(|| mean_std(&ratios));
            SummaryRow {
                sweep_param: rows[0].sweep_param.clone(),
                sweep_value: rows[0].sweep_value,
                algorithm: rows[0].algorithm.clone(),
                runs: rows.len(),
                failed: rows.iter().filter(|r| r.status != STATUS_OK).count(),
                mean_wctr: stats.map(|s| s.0),
                std_wctr: stats.map(|s| s.1),
                mean_runtime_ms: rows.iter().map(|r| r.runtime_ms).sum::<f64>() / rows.len() as f64,
            }
        })
        .collect()
}

pub fn write_summary(w: impl Write, rows: &[SummaryRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
