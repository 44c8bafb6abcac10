use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::aggregate::StrategyKind;
use crate::dataio::{load_dataset, Dataset, LabelSpec};
use crate::error::{Error, Result};
use crate::learners::{EnsembleKind, LearnerConfig};
use crate::loss::LossKind;

/// Where to find one dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetRef {
    /// Name used in result tables; defaults to the file stem.
    #[serde(default)]
    pub name: Option<String>,
    /// ARFF or interchange CSV file.
    pub path: PathBuf,
    /// MULAN XML label header. Defaults to `path` with an `.xml` extension.
    #[serde(default)]
    pub labels: Option<PathBuf>,
    /// Alternatively, the number of trailing label attributes.
    #[serde(default)]
    pub last_labels: Option<usize>,
}

impl DatasetRef {
    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            self.path
                .file_stem()
                .map_or_else(|| self.path.display().to_string(), |s| s.to_string_lossy().into_owned())
        })
    }

    /// Loads the dataset, resolving relative paths against `base`.
    pub fn load(&self, base: &Path) -> Result<Dataset> {
        let path = base.join(&self.path);
        let xml = self.labels.as_ref().map(|p| base.join(p));
        let spec = self.last_labels.map(LabelSpec::Last);
        let data = load_dataset(&path, xml.as_deref(), spec.as_ref())?;
        Ok(data.renamed(self.display_name()))
    }
}

/// The declarative description of a cross-validated comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub datasets: Vec<DatasetRef>,
    pub ensembles: Vec<EnsembleKind>,
    /// Ensemble size.
    pub m: usize,
    pub strategies: Vec<StrategyKind>,
    pub losses: Vec<LossKind>,
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    pub learner: LearnerConfig,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            datasets: Vec::new(),
            ensembles: EnsembleKind::ALL.to_vec(),
            m: 50,
            strategies: StrategyKind::ALL.to_vec(),
            losses: LossKind::ALL.to_vec(),
            folds: 10,
            repeats: 1,
            seed: 1,
            learner: LearnerConfig::default(),
        }
    }
}

/// File form of [`ExperimentSpec`]: names are kept as text so errors can
/// point at the offending key.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub datasets: Vec<DatasetRef>,
    pub ensembles: Option<Vec<String>>,
    pub m: Option<usize>,
    pub strategies: Option<Vec<String>>,
    pub losses: Option<Vec<String>>,
    pub folds: Option<usize>,
    pub repeats: Option<usize>,
    pub seed: Option<u64>,
    pub learner: Option<LearnerConfig>,
}

fn parse_list<T: std::str::FromStr<Err = Error>>(key: &str, items: &[String]) -> Result<Vec<T>> {
    items
        .iter()
        .map(|s| s.parse::<T>().map_err(|e| Error::Config(format!("{key}: {}", strip_config(e)))))
        .collect()
}

fn strip_config(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), strip_config(e))))
    }

    /// Typed spec, with defaults for absent keys.
    pub fn into_spec(self) -> Result<ExperimentSpec> {
        let d = ExperimentSpec::default();
        let spec = ExperimentSpec {
            datasets: self.datasets,
            ensembles: self.ensembles.map_or(Ok(d.ensembles), |v| parse_list("ensembles", &v))?,
            m: self.m.unwrap_or(d.m),
            strategies: self.strategies.map_or(Ok(d.strategies), |v| parse_list("strategies", &v))?,
            losses: self.losses.map_or(Ok(d.losses), |v| parse_list("losses", &v))?,
            folds: self.folds.unwrap_or(d.folds),
            repeats: self.repeats.unwrap_or(d.repeats),
            seed: self.seed.unwrap_or(d.seed),
            learner: self.learner.unwrap_or(d.learner),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let nonempty = [
            ("ensembles", self.ensembles.is_empty()),
            ("strategies", self.strategies.is_empty()),
            ("losses", self.losses.is_empty()),
        ];
        if let Some((key, _)) = nonempty.iter().find(|(_, empty)| *empty) {
            return Err(Error::Config(format!("{key}: list must not be empty")));
        }
        if self.m == 0 {
            return Err(Error::Config("m: ensemble size must be >= 1".into()));
        }
        if self.folds < 2 {
            return Err(Error::Config(format!("folds: must be >= 2, got {}", self.folds)));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats: must be >= 1".into()));
        }
        self.learner.validate().map_err(|e| Error::Config(format!("learner: {}", strip_config(e))))
    }

    /// Loads every referenced dataset relative to `base`.
    pub fn load_datasets(&self, base: &Path) -> Result<Vec<Dataset>> {
        if self.datasets.is_empty() {
            return Err(Error::Config("datasets: no dataset given".into()));
        }
        self.datasets.iter().map(|d| d.load(base)).collect()
    }
}
