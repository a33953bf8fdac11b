//! On-disk formats: instance JSON, synthetic config TOML and contact-trace text.
//!
//! Contact traces hold one record per line, `device_id start end`, separated by whitespace.
//! Blank lines and lines starting with `#` are ignored, and a first data line whose start
//! field is not a number (for example `device start end`) is treated as a header.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use anyhow::{Context, Result};
use crowdsched::data::{ContactRecord, SyntheticConfig};
use crowdsched::Instance;
use serde::{Deserialize, Serialize};

/// JSON shape of an [`Instance`]: `phi` per worker, `weights` per task, `rst[i][j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub phi: Vec<f64>,
    pub weights: Vec<f64>,
    pub rst: Vec<Vec<f64>>,
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        InstanceFile {
            phi: (0..inst.m()).map(|i| inst.phi(i)).collect(),
            weights: (0..inst.n()).map(|j| inst.weight(j)).collect(),
            rst: (0..inst.m()).map(|i| inst.rst_row(i).to_vec()).collect(),
        }
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = crowdsched::Error;

    fn try_from(f: InstanceFile) -> Result<Self, Self::Error> {
        Instance::new(f.phi, f.weights, f.rst)
    }
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from(inst)).expect("instances serialize") + "\n"
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).context("malformed instance JSON")?;
    Ok(Instance::try_from(file)?)
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    instance_from_json(&text).with_context(|| format!("in {}", path.display()))
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<()> {
    fs::write(path, instance_to_json(inst)).with_context(|| format!("writing {}", path.display()))
}

/// Parses a TOML synthetic config; missing fields take their defaults.
pub fn config_from_toml(text: &str) -> Result<SyntheticConfig> {
    let cfg: SyntheticConfig = toml::from_str(text).context("malformed config TOML")?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn read_config(path: Option<&Path>) -> Result<SyntheticConfig> {
    match path {
        None => Ok(SyntheticConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            config_from_toml(&text).with_context(|| format!("in {}", p.display()))
        }
    }
}

pub fn config_to_toml(cfg: &SyntheticConfig) -> String {
    toml::to_string(cfg).expect("configs serialize")
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("trace line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

/// Reads contact records; errors carry the 1-based line number.
pub fn parse_trace(reader: impl BufRead) -> Result<Vec<ContactRecord>> {
    let mut out = Vec::new();
    let mut seen_data = false;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.with_context(|| format!("reading trace line {line_no}"))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        let err = |message: String| TraceParseError { line: line_no, message };
        if fields.len() != 3 {
            return Err(err(format!("expected `device start end`, found {} fields", fields.len())).into());
        }
        if !seen_data && fields[1].parse::<f64>().is_err() {
            seen_data = true;
            continue;
        }
        seen_data = true;
        let start: f64 = fields[1].parse().map_err(|_| err(format!("start `{}` is not a number", fields[1])))?;
        let end: f64 = fields[2].parse().map_err(|_| err(format!("end `{}` is not a number", fields[2])))?;
        let record = ContactRecord::new(fields[0], start, end).map_err(|e| err(e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}

pub fn read_trace(path: &Path) -> Result<Vec<ContactRecord>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    parse_trace(std::io::BufReader::new(file)).with_context(|| format!("in {}", path.display()))
}

pub fn write_trace(mut w: impl Write, records: &[ContactRecord]) -> Result<()> {
    writeln!(w, "device start end")?;
    for r in records {
        writeln!(w, "{} {} {}", r.device, r.start, r.end)?;
    }
    Ok(())
}
