//! ARFF reader for MULAN-style multilabel files.
//!
//! Supports `@relation`, numeric (`numeric`, `real`, `integer`) and nominal
//! (`{a,b,...}`) attributes, dense rows and sparse `{index value, ...}` rows,
//! quoted names and values, `%` comments and `?` for missing values.

use ndarray::Array2;

use super::Dataset;
use crate::error::{Error, Result};
use crate::labels::LabelVector;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AttributeKind {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Numeric(f64),
    /// Index into the attribute's category list.
    Nominal(usize),
    Missing,
}

/// How to tell label attributes from feature attributes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelSpec {
    /// Attribute names, as listed in a MULAN XML header.
    Names(Vec<String>),
    /// The first `K` attributes are labels.
    First(usize),
    /// The last `K` attributes are labels.
    Last(usize),
}

/// A parsed ARFF file before labels are separated from features.
#[derive(Clone, Debug, PartialEq)]
pub struct ArffDocument {
    pub relation: String,
    pub attributes: Vec<Attribute>,
    pub rows: Vec<Vec<Value>>,
    /// Source line of each row, for diagnostics raised after parsing.
    pub row_lines: Vec<usize>,
    pub source_name: String,
}

struct Parser<'a> {
    source: &'a str,
    line: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            source_name: self.source.to_string(),
            line: self.line,
            message: message.into(),
        }
    }
}

/// Splits on unquoted `sep`, honouring single and double quotes and backslash escapes.
fn split_fields(s: &str, sep: char) -> std::result::Result<Vec<String>, String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    let mut quoted_field = false;
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        match quote {
            Some(q) => match c {
                '\\' => cur.push(chars.next().ok_or("dangling escape")?),
                c if c == q => quote = None,
                c => cur.push(c),
            },
            None => match c {
                '\'' | '"' => {
                    if !cur.trim().is_empty() {
                        return Err(format!("unexpected quote after `{}`", cur.trim()));
                    }
                    cur.clear();
                    quote = Some(c);
                    quoted_field = true;
                }
                c if c == sep => {
                    fields.push(finish_field(&cur, quoted_field));
                    cur.clear();
                    quoted_field = false;
                }
                c => {
                    if quoted_field {
                        if !c.is_whitespace() {
                            return Err("text after closing quote".into());
                        }
                    } else {
                        cur.push(c);
                    }
                }
            },
        }
    }
    if quote.is_some() {
        return Err("unterminated quote".into());
    }
    fields.push(finish_field(&cur, quoted_field));
    Ok(fields)
}

/// Splits on commas outside quotes, keeping the quotes in the pieces.
fn split_raw(s: &str) -> std::result::Result<Vec<String>, String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        match (quote, c) {
            (Some(_), '\\') => {
                cur.push(c);
                cur.push(chars.next().ok_or("dangling escape")?);
            }
            (Some(q), c) if c == q => {
                quote = None;
                cur.push(c);
            }
            (None, '\'' | '"') => {
                quote = Some(c);
                cur.push(c);
            }
            (None, ',') => fields.push(std::mem::take(&mut cur).trim().to_string()),
            _ => cur.push(c),
        }
    }
    if quote.is_some() {
        return Err("unterminated quote".into());
    }
    fields.push(cur.trim().to_string());
    Ok(fields)
}

fn finish_field(raw: &str, quoted: bool) -> String {
    if quoted {
        raw.to_string()
    } else {
        raw.trim().to_string()
    }
}

/// Takes a possibly quoted leading token off `s`, returning it and the rest.
fn take_token(s: &str) -> std::result::Result<(String, &str), String> {
    let s = s.trim_start();
    let mut chars = s.char_indices();
    match chars.next() {
        None => Err("missing name".into()),
        Some((_, q @ ('\'' | '"'))) => {
            let mut out = String::new();
            let mut escaped = false;
            for (i, c) in chars {
                if escaped {
                    out.push(c);
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    return Ok((out, &s[i + 1..]));
                } else {
                    out.push(c);
                }
            }
            Err("unterminated quoted name".into())
        }
        Some(_) => {
            let end = s.find(|c: char| c.is_whitespace() || c == '{').unwrap_or(s.len());
            Ok((s[..end].to_string(), &s[end..]))
        }
    }
}

fn keyword<'a>(line: &'a str, kw: &str) -> Option<&'a str> {
    let head = line.get(..kw.len())?;
    if head.eq_ignore_ascii_case(kw) && line[kw.len()..].chars().next().is_none_or(char::is_whitespace) {
        Some(&line[kw.len()..])
    } else {
        None
    }
}

fn parse_attribute(p: &Parser, rest: &str) -> Result<Attribute> {
    let (name, rest) = take_token(rest).map_err(|e| p.error(format!("@attribute: {e}")))?;
    if name.is_empty() {
        return Err(p.error("@attribute with empty name"));
    }
    let ty = rest.trim();
    let kind = if let Some(body) = ty.strip_prefix('{') {
        let body = body
            .strip_suffix('}')
            .ok_or_else(|| p.error(format!("nominal attribute `{name}` is missing its closing brace")))?;
        let values = split_fields(body, ',').map_err(|e| p.error(format!("attribute `{name}`: {e}")))?;
        if values.iter().any(String::is_empty) {
            return Err(p.error(format!("nominal attribute `{name}` has an empty category")));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(p.error(format!("nominal attribute `{name}` repeats category `{v}`")));
            }
        }
        AttributeKind::Nominal(values)
    } else {
        match ty.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => AttributeKind::Numeric,
            "" => return Err(p.error(format!("attribute `{name}` has no type"))),
            other => return Err(p.error(format!("attribute `{name}` has unsupported type `{other}`"))),
        }
    };
    Ok(Attribute { name, kind })
}

fn parse_value(p: &Parser, attr: &Attribute, raw: &str) -> Result<Value> {
    if raw == "?" {
        return Ok(Value::Missing);
    }
    match &attr.kind {
        AttributeKind::Numeric => raw
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Value::Numeric)
            .ok_or_else(|| p.error(format!("attribute `{}`: `{raw}` is not a number", attr.name))),
        AttributeKind::Nominal(values) => values
            .iter()
            .position(|v| v == raw)
            .map(Value::Nominal)
            .ok_or_else(|| p.error(format!("attribute `{}`: unknown category `{raw}`", attr.name))),
    }
}

fn default_value(attr: &Attribute) -> Value {
    match attr.kind {
        AttributeKind::Numeric => Value::Numeric(0.0),
        AttributeKind::Nominal(_) => Value::Nominal(0),
    }
}

fn parse_row(p: &Parser, attrs: &[Attribute], line: &str) -> Result<Vec<Value>> {
    if let Some(body) = line.strip_prefix('{') {
        let body = body
            .strip_suffix('}')
            .ok_or_else(|| p.error("sparse row is missing its closing brace"))?;
        let mut row: Vec<Value> = attrs.iter().map(default_value).collect();
        let mut last: Option<usize> = None;
        if body.trim().is_empty() {
            return Ok(row);
        }
        for entry in split_raw(body).map_err(|e| p.error(e))? {
            let (idx, raw) = entry
                .split_once(char::is_whitespace)
                .ok_or_else(|| p.error(format!("sparse entry `{entry}` is not `index value`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| p.error(format!("sparse index `{idx}` is not a nonnegative integer")))?;
            if idx >= attrs.len() {
                return Err(p.error(format!("sparse index {idx} out of range for {} attributes", attrs.len())));
            }
            if last.is_some_and(|l| idx <= l) {
                return Err(p.error(format!("sparse index {idx} is not increasing")));
            }
            last = Some(idx);
            let raw = raw.trim();
            let raw = raw
                .strip_prefix('\'')
                .and_then(|r| r.strip_suffix('\''))
                .or_else(|| raw.strip_prefix('"').and_then(|r| r.strip_suffix('"')))
                .unwrap_or(raw);
            row[idx] = parse_value(p, &attrs[idx], raw)?;
        }
        Ok(row)
    } else {
        let fields = split_fields(line, ',').map_err(|e| p.error(e))?;
        if fields.len() != attrs.len() {
            return Err(p.error(format!(
                "row has {} values, expected {} (one per attribute)",
                fields.len(),
                attrs.len()
            )));
        }
        attrs.iter().zip(&fields).map(|(a, f)| parse_value(p, a, f)).collect()
    }
}

impl ArffDocument {
    /// Parses ARFF text. `source_name` prefixes every diagnostic.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut p = Parser { source: source_name, line: 0 };
        let mut relation: Option<String> = None;
        let mut attributes: Vec<Attribute> = Vec::new();
        let mut rows = Vec::new();
        let mut row_lines = Vec::new();
        let mut in_data = false;
        for (i, raw) in text.lines().enumerate() {
            p.line = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('%') {
                continue;
            }
            if in_data {
                rows.push(parse_row(&p, &attributes, line)?);
                row_lines.push(p.line);
            } else if let Some(rest) = keyword(line, "@relation") {
                if relation.is_some() {
                    return Err(p.error("duplicate @relation"));
                }
                let (name, _) = take_token(rest).map_err(|e| p.error(format!("@relation: {e}")))?;
                relation = Some(name);
            } else if let Some(rest) = keyword(line, "@attribute") {
                if relation.is_none() {
                    return Err(p.error("@attribute before @relation"));
                }
                let attr = parse_attribute(&p, rest)?;
                if attributes.iter().any(|a| a.name == attr.name) {
                    return Err(p.error(format!("duplicate attribute `{}`", attr.name)));
                }
                attributes.push(attr);
            } else if keyword(line, "@data").is_some() {
                if attributes.is_empty() {
                    return Err(p.error("@data before any @attribute"));
                }
                in_data = true;
            } else {
                return Err(p.error(format!("unexpected header line `{line}`")));
            }
        }
        p.line += 1;
        let relation = relation.ok_or_else(|| p.error("missing @relation"))?;
        if !in_data {
            return Err(p.error("missing @data section"));
        }
        if rows.is_empty() {
            return Err(p.error("@data section has no rows"));
        }
        Ok(ArffDocument {
            relation,
            attributes,
            rows,
            row_lines,
            source_name: source_name.to_string(),
        })
    }

    /// Counts of `(numeric, nominal)` attributes among `indices`.
    pub fn kind_counts(&self, indices: impl IntoIterator<Item = usize>) -> (usize, usize) {
        indices.into_iter().fold((0, 0), |(num, nom), i| match self.attributes[i].kind {
            AttributeKind::Numeric => (num + 1, nom),
            AttributeKind::Nominal(_) => (num, nom + 1),
        })
    }

    /// Indices of the label attributes, in label order.
    pub fn label_indices(&self, spec: &LabelSpec) -> Result<Vec<usize>> {
        let n = self.attributes.len();
        let idx: Vec<usize> = match spec {
            LabelSpec::Names(names) => names
                .iter()
                .map(|name| {
                    self.attributes
                        .iter()
                        .position(|a| &a.name == name)
                        .ok_or_else(|| Error::invalid(format!("label `{name}` is not an attribute of `{}`", self.relation)))
                })
                .collect::<Result<_>>()?,
            LabelSpec::First(k) | LabelSpec::Last(k) if *k >= n => {
                return Err(Error::invalid(format!(
                    "{k} labels requested but the file has only {n} attributes"
                )))
            }
            LabelSpec::First(k) => (0..*k).collect(),
            LabelSpec::Last(k) => (n - k..n).collect(),
        };
        if idx.is_empty() {
            return Err(Error::Empty("label set"));
        }
        Ok(idx)
    }

    /// Separates labels from features. Nominal features are one-hot encoded;
    /// a `?` in a nominal feature gets its own `name=?` indicator column.
    /// Missing numeric features become NaN.
    pub fn into_dataset(self, spec: &LabelSpec) -> Result<Dataset> {
        let label_idx = self.label_indices(spec)?;
        let mut is_label = vec![false; self.attributes.len()];
        for &i in &label_idx {
            is_label[i] = true;
        }

        let mut labels = Vec::with_capacity(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            let bits = label_idx
                .iter()
                .map(|&i| {
                    label_bit(&self.attributes[i], row[i]).map_err(|message| Error::Parse {
                        source_name: self.source_name.clone(),
                        line: self.row_lines[r],
                        message,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            labels.push(LabelVector::new(bits)?);
        }

        // Column layout of the encoded features.
        let mut names = Vec::new();
        let mut layout = Vec::new();
        for (i, attr) in self.attributes.iter().enumerate().filter(|(i, _)| !is_label[*i]) {
            layout.push((i, names.len()));
            match &attr.kind {
                AttributeKind::Numeric => names.push(attr.name.clone()),
                AttributeKind::Nominal(values) => {
                    names.extend(values.iter().map(|v| format!("{}={v}", attr.name)));
                    if self.rows.iter().any(|row| row[i] == Value::Missing) {
                        names.push(format!("{}=?", attr.name));
                    }
                }
            }
        }
        let mut x = Array2::<f64>::zeros((self.rows.len(), names.len()));
        for (r, row) in self.rows.iter().enumerate() {
            for &(i, col) in &layout {
                match (&self.attributes[i].kind, row[i]) {
                    (AttributeKind::Numeric, Value::Numeric(v)) => x[[r, col]] = v,
                    (AttributeKind::Numeric, _) => x[[r, col]] = f64::NAN,
                    (AttributeKind::Nominal(_), Value::Nominal(c)) => x[[r, col + c]] = 1.0,
                    (AttributeKind::Nominal(values), _) => x[[r, col + values.len()]] = 1.0,
                }
            }
        }
        let label_names = label_idx.iter().map(|&i| self.attributes[i].name.clone()).collect();
        Dataset::new(self.relation, x, labels, names, label_names)
    }
}

fn label_bit(attr: &Attribute, v: Value) -> std::result::Result<bool, String> {
    let raw = match (&attr.kind, v) {
        (_, Value::Missing) => return Err(format!("label `{}` is missing", attr.name)),
        (AttributeKind::Nominal(values), Value::Nominal(c)) => values[c].clone(),
        (AttributeKind::Numeric, Value::Numeric(x)) => x.to_string(),
        _ => unreachable!("values are parsed against their attribute kind"),
    };
    match raw.as_str() {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(format!("label `{}` has non-binary value `{other}`", attr.name)),
    }
}

/// Parses ARFF text into a dataset with the given label selection.
pub fn parse_arff(text: &str, source_name: &str, labels: &LabelSpec) -> Result<Dataset> {
    ArffDocument::parse(text, source_name)?.into_dataset(labels)
}
