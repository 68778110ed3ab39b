use serde::Serialize;
use serde_json::Value;

use super::{Format, Settings, SCHEMA_VERSION};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Ok,
    /// Routes or an expected value disagree (exit 1).
    Disagreement(String),
    /// The evidence never settled (exit 3).
    NonStabilizing(String),
}

impl Status {
    pub fn exit_code(&self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Disagreement(_) => 1,
            Status::NonStabilizing(_) => 3,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Disagreement(_) => "disagreement",
            Status::NonStabilizing(_) => "non-stabilizing",
        }
    }

    fn message(&self) -> Option<&str> {
        match self {
            Status::Ok => None,
            Status::Disagreement(m) | Status::NonStabilizing(m) => Some(m),
        }
    }
}

/// Flat view of a result for CSV and text output.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// What a command produced, before formatting.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub command: &'static str,
    pub parameters: Value,
    pub result: Value,
    pub status: Status,
    pub table: Table,
    /// One-line statements printed above the table in text mode.
    pub summary: Vec<String>,
}

#[derive(Serialize)]
struct Document<'a> {
    schema_version: u32,
    command: &'a str,
    status: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<&'a str>,
    settings: &'a Settings,
    parameters: &'a Value,
    result: &'a Value,
}

pub(super) fn render(outcome: &Outcome, settings: &Settings) -> Result<String> {
    match settings.format {
        Format::Json => {
            let doc = Document {
                schema_version: SCHEMA_VERSION,
                command: outcome.command,
                status: outcome.status.label(),
                message: outcome.status.message(),
                settings,
                parameters: &outcome.parameters,
                result: &outcome.result,
            };
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::invalid(format!("csv output: {e}"));
            w.write_record(&outcome.table.headers).map_err(csv_err)?;
            for row in &outcome.table.rows {
                w.write_record(row).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::invalid(format!("csv output: {e}")))?;
            String::from_utf8(bytes).map_err(|e| Error::invalid(format!("csv output: {e}")))
        }
        Format::Text => Ok(text(outcome)),
    }
}

fn text(outcome: &Outcome) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} [{}]\n", outcome.command, outcome.status.label()));
    if let Some(m) = outcome.status.message() {
        out.push_str(&format!("  {m}\n"));
    }
    for line in &outcome.summary {
        out.push_str(&format!("  {line}\n"));
    }
    let t = &outcome.table;
    if t.rows.is_empty() {
        return out;
    }
    let widths: Vec<usize> = (0..t.headers.len())
        .map(|c| {
            t.rows
                .iter()
                .map(|r| r[c].chars().count())
                .chain([t.headers[c].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:>w$}")).collect();
        format!("  {}\n", padded.join("  "))
    };
    out.push('\n');
    out.push_str(&line(&t.headers));
    for row in &t.rows {
        out.push_str(&line(row));
    }
    out
}
