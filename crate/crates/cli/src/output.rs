//! JSON-lines and CSV report writers.
//!
//! Reals are printed as `{:.16e}` (17 significant digits, lossless round
//! trip); non-finite values become `null` in JSON and `NaN`/`inf` in CSV.

use std::io::Write;

use serde::Serialize;
use serde_json::value::RawValue;
use weighted_iso::verify::SweepPoint;
use weighted_iso::{DeficitReport, Status};

/// A real that serializes with a fixed number of digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Num {
    pub fn text(self) -> String {
        if self.0.is_finite() {
            format!("{:.16e}", self.0)
        } else {
            self.0.to_string()
        }
    }
}

impl Serialize for Num {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            RawValue::from_string(self.text())
                .map_err(serde::ser::Error::custom)?
                .serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepOut {
    pub parameter: String,
    pub value: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchOut {
    pub budget: usize,
    pub evaluations: usize,
    pub failed_evaluations: usize,
    pub modes: Vec<usize>,
    pub start: Vec<Num>,
    /// `(r0, ε_{modes[0]}, …)` at the smallest relative deficit found.
    pub best: Vec<Num>,
}

/// One output line.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub manifest_sha256: String,
    pub case: String,
    pub lhs: Num,
    pub rhs: Num,
    pub deficit: Num,
    pub rel_deficit: Num,
    pub status: Status,
    pub pass: bool,
    pub equality_expected: bool,
    pub error_estimate: Option<Num>,
    pub hypotheses: Vec<String>,
    pub notes: Vec<String>,
    pub sweep: Option<SweepOut>,
    pub search: Option<SearchOut>,
}

impl Record {
    pub fn new(hash: &str, r: DeficitReport) -> Self {
        Self {
            manifest_sha256: hash.to_string(),
            case: r.case,
            lhs: Num(r.lhs),
            rhs: Num(r.rhs),
            deficit: Num(r.deficit),
            rel_deficit: Num(r.rel_deficit),
            status: r.status,
            pass: r.pass,
            equality_expected: r.equality_expected,
            error_estimate: r.error_estimate.map(Num),
            hypotheses: r.hypotheses,
            notes: r.notes,
            sweep: r.sweep.map(|SweepPoint { parameter, value }| SweepOut {
                parameter,
                value: Num(value),
            }),
            search: None,
        }
    }

    /// The CSV `case` column: the case id, tagged with the sweep point if any.
    fn label(&self) -> String {
        match &self.sweep {
            Some(s) => format!("{}[{}={}]", self.case, s.parameter, s.value.0),
            None if self.search.is_some() => format!("{}[search]", self.case),
            None => self.case.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

pub const CSV_HEADER: [&str; 7] = [
    "case",
    "lhs",
    "rhs",
    "deficit",
    "rel_deficit",
    "status",
    "pass",
];

/// Streams records in the chosen format.
pub enum Sink<W: Write> {
    Jsonl(W),
    Csv(Box<csv::Writer<W>>),
}

impl<W: Write> Sink<W> {
    pub fn new(out: W, format: Format) -> anyhow::Result<Self> {
        Ok(match format {
            Format::Jsonl => Sink::Jsonl(out),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(CSV_HEADER)?;
                Sink::Csv(Box::new(w))
            }
        })
    }

    pub fn write(&mut self, record: &Record) -> anyhow::Result<()> {
        match self {
            Sink::Jsonl(w) => {
                serde_json::to_writer(&mut *w, record)?;
                w.write_all(b"\n")?;
            }
            Sink::Csv(w) => w.write_record([
                record.label(),
                record.lhs.text(),
                record.rhs.text(),
                record.deficit.text(),
                record.rel_deficit.text(),
                record.status.to_string(),
                record.pass.to_string(),
            ])?,
        }
        Ok(())
    }

    pub fn finish(self) -> anyhow::Result<()> {
        match self {
            Sink::Jsonl(mut w) => w.flush()?,
            Sink::Csv(mut w) => w.flush()?,
        }
        Ok(())
    }
}
