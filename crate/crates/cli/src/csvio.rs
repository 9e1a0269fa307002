//! CSV encodings for series, traces and experiment reports.
//!
//! Floats are written with Rust's shortest round-trip decimal formatting, so
//! reading a file back reproduces every `f64` bit for bit. Lines starting
//! with `#` are comments and carry the run manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use fracdim::TimeSeries;

use crate::error::{CliError, CliResult};

pub const ENCODING_NOTE: &str = "values: shortest round-trip decimal (f64 exact)";

/// Writes `# `-prefixed comment lines followed by CSV records.
pub struct CsvOut {
    inner: csv::Writer<BufWriter<File>>,
}

impl CsvOut {
    pub fn create(path: &Path, comments: &[String]) -> CliResult<Self> {
        let file = File::create(path)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        for c in comments {
            for line in c.lines() {
                writeln!(w, "# {line}")?;
            }
        }
        Ok(Self {
            inner: csv::Writer::from_writer(w),
        })
    }

    pub fn record<I, T>(&mut self, fields: I) -> CliResult<()>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.inner.write_record(fields).map_err(csv_io)
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.inner.flush()?;
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_series(path: &Path, series: &TimeSeries, comments: &[String]) -> CliResult<()> {
    let mut out = CsvOut::create(path, comments)?;
    out.record(["index", "value"])?;
    for (i, v) in series.samples().iter().enumerate() {
        out.record([(i + 1).to_string(), fmt_f64(*v)])?;
    }
    out.finish()
}

/// Reads an `index,value` series. Indices must run 1, 2, ...
pub fn read_series(path: &Path) -> CliResult<TimeSeries> {
    let file = File::open(path)
        .map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let parse_err = |msg: String| CliError::Parse(format!("{}: {msg}", path.display()));

    let headers = reader
        .headers()
        .map_err(|e| parse_err(e.to_string()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(idx_col), Some(val_col)) = (col("index"), col("value")) else {
        return Err(parse_err("expected header 'index,value'".into()));
    };

    let mut values = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| parse_err(e.to_string()))?;
        let line = row + 1;
        let index: usize = rec
            .get(idx_col)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(format!("row {line}: bad index")))?;
        if index != line {
            return Err(parse_err(format!(
                "row {line}: expected index {line}, found {index}"
            )));
        }
        let value: f64 = rec
            .get(val_col)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(format!("row {line}: bad value")))?;
        if !value.is_finite() {
            return Err(parse_err(format!("row {line}: value is not finite")));
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(parse_err("no samples".into()));
    }
    TimeSeries::new(values).map_err(|e| parse_err(e.to_string()))
}
