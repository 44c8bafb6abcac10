//! CSV interchange format.
//!
//! A header row names every column. Feature columns come first, then label
//! columns whose header is `label:<name>`. Features are written with enough
//! digits to round-trip exactly; a missing feature is `?`. Labels are `0`/`1`.

use std::path::Path;

use ndarray::Array2;

use super::Dataset;
use crate::error::{Error, Result};
use crate::labels::LabelVector;

pub const LABEL_PREFIX: &str = "label:";

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::io(path, std::io::Error::other(e.to_string())),
        _ => Error::Parse {
            source_name: path.display().to_string(),
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        },
    }
}

pub fn write_csv(data: &Dataset, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = data
        .feature_names()
        .iter()
        .cloned()
        .chain(data.label_names().iter().map(|n| format!("{LABEL_PREFIX}{n}")));
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for (row, y) in data.features().rows().into_iter().zip(data.labels()) {
        let fields = row
            .iter()
            .map(|v| if v.is_nan() { "?".to_string() } else { format!("{v:?}") })
            .chain(y.iter().map(|b| if b { "1" } else { "0" }.to_string()));
        w.write_record(fields).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Dataset> {
    let source = path.display().to_string();
    let located = |line: u64, message: String| Error::Parse {
        source_name: source.clone(),
        line: line as usize,
        message,
    };
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    let is_label: Vec<bool> = header.iter().map(|h| h.starts_with(LABEL_PREFIX)).collect();
    let feature_names: Vec<String> = header.iter().filter(|h| !h.starts_with(LABEL_PREFIX)).map(String::from).collect();
    let label_names: Vec<String> = header.iter().filter_map(|h| h.strip_prefix(LABEL_PREFIX)).map(String::from).collect();
    if label_names.is_empty() {
        return Err(located(1, format!("no `{LABEL_PREFIX}` columns in header")));
    }

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let mut bits = Vec::with_capacity(label_names.len());
        for (field, &label) in record.iter().zip(&is_label) {
            if label {
                bits.push(match field.trim() {
                    "0" => false,
                    "1" => true,
                    other => return Err(located(line, format!("label value `{other}` is not 0 or 1"))),
                });
            } else {
                values.push(match field.trim() {
                    "?" => f64::NAN,
                    v => v
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| located(line, format!("`{v}` is not a number")))?,
                });
            }
        }
        labels.push(LabelVector::new(bits)?);
    }
    if labels.is_empty() {
        return Err(located(2, "no data rows".into()));
    }
    let x = Array2::from_shape_vec((labels.len(), feature_names.len()), values)
        .map_err(|e| Error::invalid(format!("{source}: {e}")))?;
    let name = path.file_stem().map_or_else(|| source.clone(), |s| s.to_string_lossy().into_owned());
    Ok(Dataset::new(name, x, labels, feature_names, label_names)?.with_provenance(format!("csv:{source}")))
}
