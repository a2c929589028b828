//! CSV and JSON rendering of sweep rows. Numbers are written with 10
//! significant digits.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{SweepResult, SweepRow};

pub const CSV_COLUMNS: [&str; 11] = [
    "swept_param",
    "swept_value",
    "protocol",
    "fraction",
    "mode",
    "method",
    "p_out",
    "capacity",
    "throughput",
    "stderr",
    "note",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

fn round10(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.9e}").parse().expect("formatted float parses")
    } else {
        x
    }
}

fn fmt_number(x: f64) -> String {
    let r = round10(x);
    let a = r.abs();
    if r == 0.0 || (1e-4..1e10).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_number).unwrap_or_default()
}

fn label<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => unreachable!("labels serialize as strings"),
    }
}

impl SweepRow {
    /// The row as it reads back after output: every number cut to 10
    /// significant digits.
    pub fn rounded(&self) -> SweepRow {
        let r = |x: Option<f64>| x.map(round10);
        SweepRow {
            swept_value: round10(self.swept_value),
            fraction: r(self.fraction),
            p_out: r(self.p_out),
            capacity: r(self.capacity),
            throughput: r(self.throughput),
            stderr: r(self.stderr),
            ..self.clone()
        }
    }

    fn csv_record(&self) -> [String; 11] {
        [
            label(&self.swept_param),
            fmt_number(self.swept_value),
            label(&self.protocol),
            fmt_opt(self.fraction),
            label(&self.mode),
            label(&self.method),
            fmt_opt(self.p_out),
            fmt_opt(self.capacity),
            fmt_opt(self.throughput),
            fmt_opt(self.stderr),
            self.note.clone().unwrap_or_default(),
        ]
    }
}

pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in &result.rows {
        w.write_record(row.csv_record())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_json<W: Write>(result: &SweepResult, mut out: W) -> Result<()> {
    let rows: Vec<SweepRow> = result.rows.iter().map(SweepRow::rounded).collect();
    serde_json::to_writer_pretty(&mut out, &rows)?;
    out.write_all(b"\n").map_err(serde_json::Error::io)?;
    Ok(())
}

/// Writes `result` to standard output or to a file.
pub fn emit(result: &SweepResult, format: OutputFormat, destination: &Destination) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        OutputFormat::Csv => write_csv(result, &mut buf)?,
        OutputFormat::Json => write_json(result, &mut buf)?,
    }
    let (path, written) = match destination {
        Destination::Stdout => (PathBuf::from("<stdout>"), io::stdout().lock().write_all(&buf)),
        Destination::File(path) => (path.clone(), File::create(path).and_then(|mut f| f.write_all(&buf))),
    };
    written.map_err(|source| Error::Io { path, source })
}

fn parse_label<T: DeserializeOwned>(field: &'static str, s: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| Error::invalid(field, format!("unrecognized value `{s}`")))
}

fn parse_number(field: &'static str, s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::invalid(field, format!("not a number: `{s}`")))
}

fn parse_opt(field: &'static str, s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_number(field, s).map(Some)
    }
}

/// Reads rows written by [`write_csv`].
pub fn parse_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(Error::invalid("header", format!("unexpected columns: {header:?}")));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let r = record?;
        rows.push(SweepRow {
            swept_param: parse_label("swept_param", &r[0])?,
            swept_value: parse_number("swept_value", &r[1])?,
            protocol: parse_label("protocol", &r[2])?,
            fraction: parse_opt("fraction", &r[3])?,
            mode: parse_label("mode", &r[4])?,
            method: parse_label("method", &r[5])?,
            p_out: parse_opt("p_out", &r[6])?,
            capacity: parse_opt("capacity", &r[7])?,
            throughput: parse_opt("throughput", &r[8])?,
            stderr: parse_opt("stderr", &r[9])?,
            note: (!r[10].is_empty()).then(|| r[10].to_string()),
        });
    }
    Ok(rows)
}

/// Reads rows written by [`write_json`].
pub fn parse_json<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    Ok(serde_json::from_reader(input)?)
}
