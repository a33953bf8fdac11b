//! Charts and text tables from benchmark CSVs.
//!
//! Every RunRecord CSV in a directory is read (files are visited in name order). Each sweep
//! parameter gets one SVG line chart of mean WCTR with ±1 standard deviation bars, one series
//! per algorithm. Rows without a sweep are charted against `n`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::records::{read_records, summarize, RunRecord, SummaryRow};

const HEADER: &str = "instance_id,algorithm,m,n,seed,wct,lp_bound,wctr,runtime_ms,status,sweep_param,sweep_value";
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    /// `(x, mean, std)` in increasing `x`.
    pub points: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub param: String,
    pub series: Vec<Series>,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub charts: Vec<Chart>,
    pub summary: Vec<SummaryRow>,
}

/// Paths of the RunRecord CSVs in `dir`, sorted.
pub fn result_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            let text = fs::read_to_string(&path)?;
            if text.lines().next() == Some(HEADER) {
                out.push(path);
            }
        }
    }
    out.sort();
    Ok(out)
}

pub fn load_results(dir: &Path) -> Result<Vec<RunRecord>> {
    let mut all = Vec::new();
    for path in result_files(dir)? {
        let file = fs::File::open(&path)?;
        all.extend(read_records(file).with_context(|| format!("in {}", path.display()))?);
    }
    Ok(all)
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

pub fn build_report(records: &[RunRecord]) -> Report {
    let keyed: Vec<RunRecord> = records
        .iter()
        .map(|r| {
            let mut r = r.clone();
            if r.sweep_param.is_empty() {
                r.sweep_param = "n".into();
                r.sweep_value = Some(r.n as f64);
            }
            r
        })
        .collect();
    let summary = summarize(&keyed);
    let mut charts: Vec<Chart> = Vec::new();
    for row in &summary {
        let (Some(x), Some(mean)) = (row.sweep_value, row.mean_wctr) else { continue };
        let std = row.std_wctr.unwrap_or(0.0);
        let chart = match charts.iter_mut().find(|c| c.param == row.sweep_param) {
            Some(c) => c,
            None => {
                charts.push(Chart { param: row.sweep_param.clone(), series: Vec::new(), x_range: (0.0, 0.0), y_range: (0.0, 0.0) });
                charts.last_mut().expect("just pushed")
            }
        };
        match chart.series.iter_mut().find(|s| s.name == row.algorithm) {
            Some(s) => s.points.push((x, mean, std)),
            None => chart.series.push(Series { name: row.algorithm.clone(), points: vec![(x, mean, std)] }),
        }
    }
    for c in &mut charts {
        let pts = c.series.iter().flat_map(|s| &s.points);
        let (mut xl, mut xh, mut yl, mut yh) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, m, s) in pts {
            xl = xl.min(x);
            xh = xh.max(x);
            yl = yl.min(m - s);
            yh = yh.max(m + s);
        }
        c.x_range = padded(xl, xh);
        c.y_range = padded(yl, yh);
    }
    Report { charts, summary }
}

fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

pub fn render_svg(chart: &Chart) -> String {
    let (w, h) = (720.0, 440.0);
    let (left, right, top, bottom) = (70.0, 160.0, 40.0, 50.0);
    let (pw, ph) = (w - left - right, h - top - bottom);
    let (x0, x1) = chart.x_range;
    let (y0, y1) = chart.y_range;
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">WCTR vs {}</text>"#, left + pw / 2.0, chart.param);
    let _ = writeln!(s, r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for k in 0..=5 {
        let fx = x0 + (x1 - x0) * k as f64 / 5.0;
        let fy = y0 + (y1 - y0) * k as f64 / 5.0;
        let (px, py) = (num(sx(fx)), num(sy(fy)));
        let _ = writeln!(s, r#"<line x1="{px}" y1="{}" x2="{px}" y2="{}" stroke="black"/>"#, top + ph, top + ph + 5.0);
        let _ = writeln!(s, r#"<text x="{px}" y="{}" text-anchor="middle">{}</text>"#, top + ph + 18.0, num(fx));
        let _ = writeln!(s, r##"<line x1="{left}" y1="{py}" x2="{}" y2="{py}" stroke="#dddddd"/>"##, left + pw);
        let _ = writeln!(s, r#"<text x="{}" y="{py}" text-anchor="end" dy="4">{}</text>"#, left - 6.0, num(fy));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, left + pw / 2.0, h - 12.0, chart.param);
    let _ = writeln!(s, r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">mean WCTR</text>"#, top + ph / 2.0, top + ph / 2.0);
    for (k, series) in chart.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = series.points.iter().map(|&(x, m, _)| format!("{},{}", num(sx(x)), num(sy(m)))).collect();
        let _ = writeln!(s, r#"<g class="series" data-name="{}">"#, series.name);
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, path.join(" "));
        for &(x, m, sd) in &series.points {
            let px = num(sx(x));
            let _ = writeln!(s, r#"<line x1="{px}" y1="{}" x2="{px}" y2="{}" stroke="{color}"/>"#, num(sy(m - sd)), num(sy(m + sd)));
            let _ = writeln!(s, r#"<circle cx="{px}" cy="{}" r="3" fill="{color}"/>"#, num(sy(m)));
        }
        let ly = top + 10.0 + 20.0 * k as f64;
        let _ = writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, left + pw + 12.0, left + pw + 36.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}" dy="4">{}</text>"#, left + pw + 42.0, series.name);
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

pub fn render_table(rows: &[SummaryRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<18} {:>10} {:<10} {:>5} {:>6} {:>10} {:>10}", "param", "value", "algorithm", "runs", "failed", "mean_wctr", "std_wctr");
    for r in rows {
        let opt = |v: Option<f64>| v.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{:<18} {:>10} {:<10} {:>5} {:>6} {:>10} {:>10}",
            r.sweep_param,
            r.sweep_value.map(num).unwrap_or_else(|| "-".into()),
            r.algorithm,
            r.runs,
            r.failed,
            opt(r.mean_wctr),
            opt(r.std_wctr)
        );
    }
    s
}

/// Writes `wctr_<param>.svg` per chart and `summary.txt` into `out`; returns the files written.
pub fn write_report(report: &Report, out: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let mut written = Vec::new();
    for c in &report.charts {
        let path = out.join(format!("wctr_{}.svg", c.param));
        fs::write(&path, render_svg(c))?;
        written.push(path);
    }
    let path = out.join("summary.txt");
    fs::write(&path, render_table(&report.summary))?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::STATUS_OK;

    fn rec(algo: &str, x: f64, wctr: f64) -> RunRecord {
        RunRecord {
            instance_id: format!("{x}"),
            algorithm: algo.into(),
            m: 10,
            n: 50,
            seed: 0,
            wct: Some(wctr),
            lp_bound: Some(1.0),
            wctr: Some(wctr),
            runtime_ms: 0.0,
            status: STATUS_OK.into(),
            sweep_param: "tasks_per_worker".into(),
            sweep_value: Some(x),
        }
    }

    #[test]
    fn two_series_three_points() {
        let mut rows = Vec::new();
        for (k, x) in [5.0, 25.0, 50.0].into_iter().enumerate() {
            rows.push(rec("EDTS", x, 1.1 + 0.1 * k as f64));
            rows.push(rec("EDTS", x, 1.2 + 0.1 * k as f64));
            rows.push(rec("LRF-MIN", x, 1.5 + 0.2 * k as f64));
        }
        let report = build_report(&rows);
        assert_eq!(report.charts.len(), 1);
        let c = &report.charts[0];
        assert_eq!(c.series.len(), 2);
        assert!(c.series.iter().all(|s| s.points.len() == 3));
        assert!(c.x_range.0 <= 5.0 && c.x_range.1 >= 50.0);
        assert!(c.y_range.0 <= 1.1 && c.y_range.1 >= 1.9);
        let svg = render_svg(c);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg, render_svg(&build_report(&rows).charts[0]));
    }

    #[test]
    fn unswept_rows_chart_against_n() {
        let mut r = rec("EDTS", 0.0, 1.3);
        r.sweep_param.clear();
        r.sweep_value = None;
        let report = build_report(&[r]);
        assert_eq!(report.charts[0].param, "n");
        assert_eq!(report.charts[0].series[0].points, vec![(50.0, 1.3, 0.0)]);
    }
}
