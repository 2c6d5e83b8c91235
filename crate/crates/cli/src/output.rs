//! Sweep tables as CSV.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use etlab_core::experiments::{SweepResult, SweepRow};
use thiserror::Error;

pub const CSV_HEADER: [&str; 5] = ["gamma_over_omega", "scenario", "probability", "stderr", "method"];

/// Significant digits written for every number.
pub const SIGNIFICANT_DIGITS: usize = 10;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad header {0:?}")]
    Header(Vec<String>),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("cannot plot an empty result")]
    EmptyPlot,
}

/// Plain decimal notation with [`SIGNIFICANT_DIGITS`] significant digits.
pub fn format_decimal(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.*}", SIGNIFICANT_DIGITS - 1, 0.0);
    }
    let sig = SIGNIFICANT_DIGITS as i32;
    let exp = x.abs().log10().floor() as i32;
    let decimals = |e: i32| (sig - 1 - e).max(0) as usize;
    let s = format!("{:.*}", decimals(exp), x);
    // rounding may carry into a new leading digit (9.99…→10.0…)
    let rounded: f64 = s.parse().unwrap_or(x);
    let actual = rounded.abs().log10().floor() as i32;
    if actual != exp {
        format!("{:.*}", decimals(actual), x)
    } else {
        s
    }
}

/// Writes the table to any sink, rows in their stored order.
pub fn write_csv<W: Write>(result: &SweepResult, sink: W) -> Result<(), OutputError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for r in &result.rows {
        w.write_record([
            format_decimal(r.gamma_over_omega),
            r.scenario.clone(),
            format_decimal(r.probability),
            format_decimal(r.stderr),
            r.method.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn csv_string(result: &SweepResult) -> String {
    let mut buf = Vec::new();
    write_csv(result, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

/// Sorts a copy of `result` and writes it to `path`.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<(), OutputError> {
    let mut sorted = result.clone();
    sorted.sort();
    let wrap = |source| OutputError::Write {
        path: path.to_path_buf(),
        source,
    };
    let mut file = File::create(path).map_err(wrap)?;
    file.write_all(csv_string(&sorted).as_bytes()).map_err(wrap)?;
    Ok(())
}

pub fn parse_csv<R: Read>(source: R) -> Result<SweepResult, OutputError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(OutputError::Header(header));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |message: String| OutputError::Row { line, message };
        let num = |i: usize| -> Result<f64, OutputError> {
            rec[i]
                .parse::<f64>()
                .map_err(|e| bad(format!("{}: {e}", CSV_HEADER[i])))
        };
        rows.push(SweepRow {
            gamma_over_omega: num(0)?,
            scenario: rec[1].to_string(),
            probability: num(2)?,
            stderr: num(3)?,
            method: rec[4].parse().map_err(|e: etlab_core::Error| bad(e.to_string()))?,
        });
    }
    Ok(SweepResult { rows })
}
