//! Dataset CSV format: header row, first column `label` (0/1), remaining
//! columns numeric features, `,` delimiter, `.` decimal point.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

pub fn load_csv(path: &Path) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, path)
}

/// Parses a dataset from `reader`; `path` only labels error messages.
pub fn read_csv(reader: impl Read, path: &Path) -> Result<Dataset> {
    let err = |line: usize, message: String| Error::Csv {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers().map_err(|e| err(1, e.to_string()))?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(err(1, "empty file".into()));
    }
    if header[0].trim() != "label" {
        return Err(err(1, format!("first column must be named 'label', found '{}'", &header[0])));
    }
    if header.len() < 2 {
        return Err(err(1, "no feature columns".into()));
    }
    let names: Vec<String> = header.iter().skip(1).map(|h| h.trim().to_string()).collect();
    let p = names.len();

    let mut labels = Vec::new();
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |pos| pos.line() as usize);
            err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |pos| pos.line() as usize);
        match record[0].trim() {
            "0" => labels.push(0u8),
            "1" => labels.push(1u8),
            other => return Err(err(line, format!("label must be 0 or 1, found '{other}'"))),
        }
        for (j, cell) in record.iter().skip(1).enumerate() {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| err(line, format!("column '{}': '{cell}' is not a number", names[j])))?;
            if !v.is_finite() {
                return Err(err(line, format!("column '{}': '{cell}' is not finite", names[j])));
            }
            values.push(v);
        }
    }
    if labels.is_empty() {
        return Err(err(1, "no data rows".into()));
    }
    let features = Array2::from_shape_vec((labels.len(), p), values).expect("rows have p cells");
    Dataset::with_names(features, labels, Some(names)).map_err(|e| err(0, e.to_string()))
}

/// Writes `data` in the format `load_csv` reads. Values use the shortest
/// representation that parses back to the same bits.
pub fn write_csv(data: &Dataset, writer: impl Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["label".to_string()];
    match data.feature_names() {
        Some(names) => header.extend(names.iter().cloned()),
        None => header.extend((1..=data.p()).map(|j| format!("f{j}"))),
    }
    w.write_record(&header)?;
    for (row, &y) in data.features().rows().into_iter().zip(data.labels()) {
        let mut cells = vec![y.to_string()];
        cells.extend(row.iter().map(|v| format!("{v:?}")));
        w.write_record(&cells)?;
    }
    w.flush()
}

pub fn export_csv(data: &Dataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(data, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}
