//! Report serialization: CSV, a fixed-width text table, and plot series.
use std::fmt::Write;
use std::str::FromStr;

use thiserror::Error;

use super::{CellResult, ScenarioReport};
use crate::fuzzy::MeasureKind;

pub const CSV_HEADER: [&str; 6] = ["kind", "alpha", "cost", "pi", "status", "wall_ms"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Csv,
    Text,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "text" => Ok(ReportFormat::Text),
            other => Err(format!(
                "unknown report format `{other}` (expected csv or text)"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReportParseError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
    #[error("line {line}: bad {field} `{value}`")]
    Field {
        line: u64,
        field: &'static str,
        value: String,
    },
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Serialize the cells of `report`. CSV output uses shortest round-trip
/// float formatting and parses back to identical cells.
pub fn emit_report(report: &ScenarioReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => emit_csv(&report.cells),
        ReportFormat::Text => emit_text(report),
    }
}

fn emit_csv(cells: &[CellResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    // Writing to a Vec cannot fail.
    w.write_record(CSV_HEADER).unwrap();
    for c in cells {
        w.write_record([
            c.kind.name().to_string(),
            c.alpha.to_string(),
            opt(c.cost),
            opt(c.pi),
            c.status.name().to_string(),
            c.wall_ms.to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn emit_text(report: &ScenarioReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:>6} {:>18} {:>10} {:<16} {:>8}",
        "kind", "alpha", "cost", "pi", "status", "wall_ms"
    );
    for c in &report.cells {
        let cost = c
            .cost
            .map(|v| format!("{v:.2}"))
            .unwrap_or_else(|| "-".into());
        let pi =
            c.pi.map(|v| format!("{v:.4}"))
                .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:<12} {:>6} {:>18} {:>10} {:<16} {:>8}",
            c.kind.name(),
            c.alpha,
            cost,
            pi,
            c.status.name(),
            c.wall_ms
        );
    }
    match report.baseline {
        Some(b) => {
            let _ = writeln!(out, "baseline (possibility, alpha 0): {b:.2}");
        }
        None => out.push_str("baseline (possibility, alpha 0): unavailable\n"),
    }
    out
}

/// Two-column `alpha cost` series, one block per kind, blocks separated by
/// a blank line. Cells without a cost are skipped.
pub fn emit_plot_data(report: &ScenarioReport) -> String {
    let mut out = String::new();
    let mut kinds: Vec<MeasureKind> = Vec::new();
    for c in &report.cells {
        if !kinds.contains(&c.kind) {
            kinds.push(c.kind);
        }
    }
    for (i, kind) in kinds.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "# {kind}");
        for c in report.cells.iter().filter(|c| c.kind == *kind) {
            if let Some(cost) = c.cost {
                let _ = writeln!(out, "{} {}", c.alpha, cost);
            }
        }
    }
    out
}

/// Parse cells back from CSV produced by [`emit_report`].
pub fn parse_csv_report(text: &str) -> Result<Vec<CellResult>, ReportParseError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers()?;
    if header.iter().ne(CSV_HEADER) {
        return Err(ReportParseError::Header(
            header.iter().map(String::from).collect(),
        ));
    }
    let mut cells = Vec::new();
    for record in r.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &'static str| ReportParseError::Field {
            line,
            field: name,
            value: record.get(i).unwrap_or("").to_string(),
        };
        let get = |i: usize| record.get(i).unwrap_or("");
        let float = |i: usize, name| get(i).parse::<f64>().map_err(|_| field(i, name));
        let opt_float = |i: usize, name| match get(i) {
            "" => Ok(None),
            _ => float(i, name).map(Some),
        };
        cells.push(CellResult {
            kind: get(0).parse().map_err(|_| field(0, "kind"))?,
            alpha: float(1, "alpha")?,
            cost: opt_float(2, "cost")?,
            pi: opt_float(3, "pi")?,
            status: get(4).parse().map_err(|_| field(4, "status"))?,
            wall_ms: get(5).parse().map_err(|_| field(5, "wall_ms"))?,
        });
    }
    Ok(cells)
}
