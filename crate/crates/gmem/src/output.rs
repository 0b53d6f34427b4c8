use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{SweepRow, SweepSpec};

pub const CSV_HEADER: [&str; 7] = ["param", "chi_optimal", "chi_coherent", "gain", "entangled", "symmetric", "residual"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// JSON document written for a sweep or a single capacity point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub spec: SweepSpec,
    pub defaults_used: Vec<String>,
    pub rows: Vec<SweepRow>,
}

/// Shortest representation that parses back to the same value.
fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

/// CSV with the fixed header; failed rows leave their numeric fields empty.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            num(r.param),
            opt(r.chi_optimal, num),
            opt(r.chi_coherent, num),
            opt(r.gain, num),
            opt(r.entangled, |b| b.to_string()),
            opt(r.symmetric, |b| b.to_string()),
            opt(r.residual, num),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn to_json(report: &Report) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Csv => to_csv(&report.rows),
        Format::Json => to_json(report),
    }
}

/// Writes the rendered report to `path`, or to stdout when `path` is `None`.
pub fn emit(report: &Report, format: Format, path: Option<&Path>) -> std::io::Result<()> {
    let text = render(report, format);
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}
