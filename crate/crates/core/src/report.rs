//! CSV and JSON output for bound reports.
//!
//! CSV columns are fixed: `bound,T,params,predicted_lo,predicted_hi,computed,verdict`.
//! Floats use the shortest decimal that round-trips, so identical inputs
//! give byte-identical files. JSON writes the full reports; non-finite
//! interval ends become `null`.

use std::io::Write;

use serde::Serialize;

use crate::bounds::{BoundReport, Verdict};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 7] = [
    "bound",
    "T",
    "params",
    "predicted_lo",
    "predicted_hi",
    "computed",
    "verdict",
];

#[derive(Serialize)]
struct Row<'a> {
    bound: &'a str,
    #[serde(rename = "T")]
    t: Option<usize>,
    params: &'a str,
    predicted_lo: f64,
    predicted_hi: f64,
    computed: f64,
    verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn io(e: impl ToString) -> Error {
    Error::DomainError(format!("write failed: {}", e.to_string()))
}

pub fn write_csv<W: Write>(out: W, reports: &[BoundReport]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in reports {
        w.serialize(Row {
            bound: &r.bound,
            t: r.t,
            params: &r.params,
            predicted_lo: r.predicted_lo,
            predicted_hi: r.predicted_hi,
            computed: r.computed,
            verdict: r.verdict,
        })
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(io)?;
    writeln!(out).map_err(io)
}

pub fn write_reports<W: Write>(out: W, reports: &[BoundReport], format: Format) -> Result<()> {
    match format {
        Format::Csv => write_csv(out, reports),
        Format::Json => write_json(out, reports),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<BoundReport> {
        vec![
            BoundReport::new("a", Some(4), "k=1".into(), "", (0.1, 0.1), 0.1, 0.0),
            BoundReport::new("b", None, "x=1;y=2".into(), "", (0.0, 2.0), 3.0, 0.0),
        ]
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &sample()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "bound,T,params,predicted_lo,predicted_hi,computed,verdict\n\
             a,4,k=1,0.1,0.1,0.1,holds\n\
             b,,x=1;y=2,0.0,2.0,3.0,violated\n"
        );
    }

    #[test]
    fn json_round_trip_fields() {
        let mut buf = Vec::new();
        write_json(&mut buf, &sample()).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[1]["verdict"], "violated");
        assert_eq!(v[0]["t"], 4);
    }
}
