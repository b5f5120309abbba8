//! Report envelope and its JSON / CSV serializations.

use std::fs;
use std::io::Write;
use std::path::Path;

use cbose_core::report::{format_exponent, BoundReport};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::CliError;

/// Rows for the CSV form of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// One row per term: `term,value,paper_eq,exponent`.
    pub fn bound_terms(report: &BoundReport, prefix: &str) -> Self {
        let mut t = Self::new(&["term", "value", "paper_eq", "exponent"]);
        t.extend_bound_terms(report, prefix);
        t
    }

    pub fn extend_bound_terms(&mut self, report: &BoundReport, prefix: &str) {
        for term in &report.terms {
            self.push(vec![
                format!("{prefix}{}", term.name),
                term.value.to_string(),
                term.tag.label().to_string(),
                term.exponent
                    .as_ref()
                    .map(format_exponent)
                    .unwrap_or_default(),
            ]);
        }
        self.push(vec![
            format!("{prefix}total"),
            report.total.to_string(),
            String::new(),
            String::new(),
        ]);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub version: &'static str,
    /// Unit conventions of the numbers in `results`.
    pub units: &'static str,
    pub config: RunConfig,
    pub results: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

pub fn render(report: &Report, table: &Table, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| CliError::Output(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Output(e.to_string());
            w.write_record(&table.header).map_err(io)?;
            for row in &table.rows {
                w.write_record(row).map_err(io)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::Output(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

/// Writes to `path`, or to stdout when absent.
pub fn write_report(
    report: &Report,
    table: &Table,
    path: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let text = render(report, table, format)?;
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Output(e.to_string())),
    }
}
