//! Two-column `label,value` CSV files.

use std::io::{Read, Write};
use std::path::Path;

use logistic_horizon::{SeriesKind, TimeSeries};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("need at least 3 data rows, found {0}")]
    TooFewRows(usize),
}

pub fn read_csv(path: &Path, kind: SeriesKind) -> Result<TimeSeries, CsvError> {
    let file = std::fs::File::open(path).map_err(|source| CsvError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv_from(file, kind)
}

/// Parses rows of `label,value`, skipping an optional `label,value` header.
/// Values use a decimal point and no digit grouping.
pub fn read_csv_from(reader: impl Read, kind: SeriesKind) -> Result<TimeSeries, CsvError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i as u64 + 1;
        let record = record.map_err(|e| CsvError::Parse {
            line: e.position().map_or(line, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(line, |p| p.line());
        if record.len() != 2 {
            return Err(CsvError::Parse {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let (label, raw) = (record[0].trim(), record[1].trim());
        if i == 0 && label == "label" && raw == "value" {
            continue;
        }
        let value: f64 = raw.parse().map_err(|_| CsvError::Parse {
            line,
            message: format!("'{raw}' is not a number"),
        })?;
        if !value.is_finite() {
            return Err(CsvError::Parse {
                line,
                message: format!("'{raw}' is not finite"),
            });
        }
        labels.push(label.to_string());
        values.push(value);
    }
    if values.len() < 3 {
        return Err(CsvError::TooFewRows(values.len()));
    }
    Ok(TimeSeries::new(labels, values, kind).expect("one label per value"))
}

/// Writes a header and one row per sample. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv(ts: &TimeSeries, out: &mut dyn Write) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["label", "value"])?;
    for (label, value) in ts.labels().iter().zip(ts.values()) {
        wtr.write_record([label.as_str(), &value.to_string()])?;
    }
    wtr.flush()
}
