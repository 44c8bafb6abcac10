use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::labels::LabelVector;

/// An in-memory multilabel dataset: one feature row and one labeling per instance.
///
/// Feature values may be NaN (missing) until [`super::preprocess`] imputes them.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    name: String,
    features: Array2<f64>,
    labels: Vec<LabelVector>,
    feature_names: Vec<String>,
    label_names: Vec<String>,
    provenance: Vec<String>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        features: Array2<f64>,
        labels: Vec<LabelVector>,
        feature_names: Vec<String>,
        label_names: Vec<String>,
    ) -> Result<Self> {
        let (n, d) = features.dim();
        if n == 0 {
            return Err(Error::Empty("dataset"));
        }
        Error::check_len(n, labels.len())?;
        Error::check_len(d, feature_names.len())?;
        let k = label_names.len();
        if k == 0 {
            return Err(Error::Empty("label set"));
        }
        if let Some((i, y)) = labels.iter().enumerate().find(|(_, y)| y.len() != k) {
            return Err(Error::invalid(format!(
                "instance {i} has {} labels, expected {k}",
                y.len()
            )));
        }
        if features.iter().any(|v| v.is_infinite()) {
            return Err(Error::invalid("feature matrix contains an infinite value"));
        }
        Ok(Dataset {
            name: name.into(),
            features,
            labels,
            feature_names,
            label_names,
            provenance: Vec::new(),
        })
    }

    /// Builds a dataset with generated names `x0..`, `y0..`.
    pub fn from_parts(features: Array2<f64>, labels: Vec<LabelVector>) -> Result<Self> {
        let d = features.ncols();
        let k = labels.first().map_or(0, LabelVector::len);
        Self::new(
            "unnamed",
            features,
            labels,
            (0..d).map(|j| format!("x{j}")).collect(),
            (0..k).map(|j| format!("y{j}")).collect(),
        )
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_provenance(mut self, note: impl Into<String>) -> Self {
        self.provenance.push(note.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn labels(&self) -> &[LabelVector] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    /// Source files and transformations applied so far, oldest first.
    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn num_instances(&self) -> usize {
        self.features.nrows()
    }

    pub fn num_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn num_labels(&self) -> usize {
        self.label_names.len()
    }

    pub fn has_missing(&self) -> bool {
        self.features.iter().any(|v| v.is_nan())
    }

    /// Rows `indices` (repeats allowed) as a new dataset.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Empty("row selection"));
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= self.num_instances()) {
            return Err(Error::invalid(format!(
                "row {i} out of range for {} instances",
                self.num_instances()
            )));
        }
        Ok(Dataset {
            name: self.name.clone(),
            features: self.features.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            feature_names: self.feature_names.clone(),
            label_names: self.label_names.clone(),
            provenance: self.provenance.clone(),
        })
    }

    /// Replaces the feature block, keeping labels.
    pub fn with_features(&self, features: Array2<f64>, feature_names: Vec<String>) -> Result<Self> {
        let mut out = Dataset::new(
            self.name.clone(),
            features,
            self.labels.clone(),
            feature_names,
            self.label_names.clone(),
        )?;
        out.provenance = self.provenance.clone();
        Ok(out)
    }

    /// Labels as a 0/1 column for label `k`.
    pub fn label_column(&self, k: usize) -> Vec<bool> {
        self.labels.iter().map(|y| y.get(k)).collect()
    }
}
