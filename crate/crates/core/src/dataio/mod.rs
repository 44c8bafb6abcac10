//! Dataset ingestion, preprocessing and cross-validation folds.
//!
//! MULAN datasets come as an ARFF matrix plus an XML file naming the label
//! attributes ([`load_mulan`]). A CSV interchange format ([`write_csv`],
//! [`read_csv`]) carries the same content with label columns prefixed `label:`.

mod arff;
mod dataset;
mod folds;
mod interchange;
mod preprocess;

use std::path::Path;

pub use arff::{parse_arff, ArffDocument, Attribute, AttributeKind, LabelSpec, Value};
pub use dataset::Dataset;
pub use folds::{split_folds, FoldPlan};
pub use interchange::{read_csv, write_csv, LABEL_PREFIX};
pub use preprocess::{preprocess, Transformer};

use crate::error::{Error, Result};

/// Label attribute names from a MULAN XML header, in document order. Nested
/// label hierarchies are flattened.
pub fn parse_label_xml(text: &str, source_name: &str) -> Result<Vec<String>> {
    let doc = roxmltree::Document::parse(text).map_err(|e| Error::Parse {
        source_name: source_name.to_string(),
        line: e.pos().row as usize,
        message: e.to_string(),
    })?;
    let mut names = Vec::new();
    for node in doc.descendants().filter(|n| n.has_tag_name("label")) {
        let name = node.attribute("name").ok_or_else(|| Error::Parse {
            source_name: source_name.to_string(),
            line: doc.text_pos_at(node.range().start).row as usize,
            message: "<label> without a name attribute".into(),
        })?;
        names.push(name.to_string());
    }
    if names.is_empty() {
        return Err(Error::Parse {
            source_name: source_name.to_string(),
            line: 1,
            message: "no <label> elements".into(),
        });
    }
    Ok(names)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Loads an ARFF file with labels chosen by `labels`. The dataset is named
/// after the file stem; the `@relation` name is kept in the provenance.
pub fn load_arff(path: &Path, labels: &LabelSpec) -> Result<Dataset> {
    let name = path.display().to_string();
    let data = parse_arff(&read_text(path)?, &name, labels)?;
    let relation = data.name().to_string();
    let stem = path.file_stem().map_or_else(|| relation.clone(), |s| s.to_string_lossy().into_owned());
    Ok(data.renamed(stem).with_provenance(format!("arff:{name} (relation {relation})")))
}

/// Loads a MULAN dataset: ARFF matrix plus XML label header.
pub fn load_mulan(arff_path: &Path, xml_path: &Path) -> Result<Dataset> {
    let xml_name = xml_path.display().to_string();
    let names = parse_label_xml(&read_text(xml_path)?, &xml_name)?;
    Ok(load_arff(arff_path, &LabelSpec::Names(names))?.with_provenance(format!("labels:{xml_name}")))
}

/// Loads by extension: `.csv` uses the interchange format; anything else is
/// read as ARFF with labels from `xml` (or `labels` when given).
pub fn load_dataset(path: &Path, xml: Option<&Path>, labels: Option<&LabelSpec>) -> Result<Dataset> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    match (is_csv, xml, labels) {
        (true, _, _) => read_csv(path),
        (false, _, Some(spec)) => load_arff(path, spec),
        (false, Some(xml), None) => load_mulan(path, xml),
        (false, None, None) => {
            let sibling = path.with_extension("xml");
            if sibling.exists() {
                load_mulan(path, &sibling)
            } else {
                Err(Error::Config(format!(
                    "{}: no label header given and {} does not exist",
                    path.display(),
                    sibling.display()
                )))
            }
        }
    }
}
