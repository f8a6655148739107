use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::trials::TrialRecord;
use crate::error::{Error, Result};

/// Version tag carried by every JSONL line.
pub const SCHEMA_VERSION: u32 = 1;

/// Column order of the CSV output.
pub const CSV_HEADER: &str = "trial,n,error,success,wall_time_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Jsonl,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "jsonl" => Ok(ReportFormat::Jsonl),
            other => Err(Error::Config(format!("unknown report format {other:?}, expected csv or jsonl"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonlLine {
    schema_version: u32,
    #[serde(flatten)]
    record: TrialRecord,
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(',')).map_err(io_err)?;
    for r in records {
        w.serialize(r).map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<TrialRecord>> {
    csv::Reader::from_reader(input).deserialize().map(|r| r.map_err(io_err)).collect()
}

pub fn write_jsonl<W: Write>(records: &[TrialRecord], mut out: W) -> Result<()> {
    for r in records {
        let line = JsonlLine { schema_version: SCHEMA_VERSION, record: r.clone() };
        serde_json::to_writer(&mut out, &line).map_err(io_err)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<TrialRecord>> {
    let mut records = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: JsonlLine = serde_json::from_str(&line).map_err(io_err)?;
        if parsed.schema_version != SCHEMA_VERSION {
            return Err(Error::Io(format!("unsupported schema version {}", parsed.schema_version)));
        }
        records.push(parsed.record);
    }
    Ok(records)
}

/// Writes `records` to `path` in `format`.
pub fn emit_report(records: &[TrialRecord], format: ReportFormat, path: &Path) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    match format {
        ReportFormat::Csv => write_csv(records, file),
        ReportFormat::Jsonl => write_jsonl(records, file),
    }
}
