//! Plain-text relevance matrices for aggregating externally produced members.
//!
//! One file per member. Each non-empty line is an instance, holding `K`
//! comma-separated probabilities. Lines starting with `#` are comments.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::labels::{LabelVector, MarginalVector};

/// One member's marginals for every instance of a file.
#[derive(Clone, Debug, PartialEq)]
pub struct MemberMatrix {
    rows: Vec<MarginalVector>,
}

impl MemberMatrix {
    pub fn new(rows: Vec<MarginalVector>) -> Result<Self> {
        let first = rows.first().ok_or(Error::Empty("member matrix"))?;
        let k = first.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != k) {
            return Err(Error::invalid(format!("row {} has {} columns, expected {k}", i + 1, r.len())));
        }
        Ok(MemberMatrix { rows })
    }

    /// Parses matrix text; `source_name` appears in diagnostics.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut rows: Vec<MarginalVector> = Vec::new();
        let mut width = None;
        for record in reader.records() {
            let record = record.map_err(|e| parse_error(source_name, e.position().map_or(0, |p| p.line()), e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            if record.iter().all(str::is_empty) {
                continue;
            }
            let row_no = rows.len() + 1;
            let expected = *width.get_or_insert(record.len());
            if record.len() != expected {
                return Err(parse_error(
                    source_name,
                    line,
                    format!("row {row_no} has {} columns, expected {expected}", record.len()),
                ));
            }
            let probs = record
                .iter()
                .enumerate()
                .map(|(c, field)| {
                    let v: f64 = field.parse().map_err(|_| {
                        parse_error(source_name, line, format!("row {row_no}, column {}: `{field}` is not a number", c + 1))
                    })?;
                    if !(0.0..=1.0).contains(&v) {
                        return Err(parse_error(
                            source_name,
                            line,
                            format!("row {row_no}, column {}: probability {v} is outside [0, 1]", c + 1),
                        ));
                    }
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(MarginalVector::new(probs)?);
        }
        if rows.is_empty() {
            return Err(parse_error(source_name, 0, "no rows".into()));
        }
        MemberMatrix::new(rows)
    }

    pub fn rows(&self) -> &[MarginalVector] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_labels(&self) -> usize {
        self.rows[0].len()
    }

    /// Renders in the format read by [`MemberMatrix::parse`], full precision.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let fields: Vec<String> = row.as_slice().iter().map(|p| format!("{p:?}")).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

fn parse_error(source_name: &str, line: u64, message: String) -> Error {
    Error::Parse {
        source_name: source_name.to_string(),
        line: line as usize,
        message,
    }
}

pub fn read_member_matrix(path: &Path) -> Result<MemberMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    MemberMatrix::parse(&text, &path.display().to_string())
}

/// Writes one 0/1 row per prediction, comma separated.
pub fn write_predictions<W: Write>(mut out: W, predictions: &[LabelVector]) -> std::io::Result<()> {
    for y in predictions {
        let fields: Vec<&str> = y.iter().map(|b| if b { "1" } else { "0" }).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
