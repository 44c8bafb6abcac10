//! Base learners and ensemble constructors.
//!
//! Three ensemble kinds are provided: bagged binary relevance ([`train_ebr`]),
//! ensembles of classifier chains ([`train_ecc`]) and ensembles of
//! multi-objective decision trees ([`train_emodt`]). Every trained member
//! turns an instance into a [`MarginalVector`], see [`EnsembleModel::member_relevance`].

mod chain;
mod logistic;
mod tree;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use chain::{predict_chain, train_chain, ChainOrder, ClassifierChain};
pub use logistic::{gradient, objective, predict_proba, sigmoid, train_logistic, LinearModel, PROBA_FLOOR};
pub use tree::{train_modt, TreeNode};

use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::labels::MarginalVector;
use crate::seeding;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerConfig {
    /// Weight of the `lambda * ||w||^2` penalty. The bias is not penalized.
    pub l2_lambda: f64,
    pub max_iters: usize,
    /// Gradient descent stops once the gradient norm falls to this value.
    pub grad_tolerance: f64,
    pub tree_min_leaf: usize,
    /// `None` grows trees until another stopping rule fires.
    pub tree_max_depth: Option<usize>,
    /// Train each member on a bootstrap sample of size N.
    pub bootstrap: bool,
    /// Laplace-smooth tree leaf proportions, `(c + 1) / (n + 2)`.
    pub leaf_smoothing: bool,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            l2_lambda: 1e-4,
            max_iters: 500,
            grad_tolerance: 1e-6,
            tree_min_leaf: 5,
            tree_max_depth: None,
            bootstrap: true,
            leaf_smoothing: false,
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return Err(Error::Config(format!("l2_lambda must be >= 0, got {}", self.l2_lambda)));
        }
        if !(self.grad_tolerance >= 0.0 && self.grad_tolerance.is_finite()) {
            return Err(Error::Config(format!(
                "grad_tolerance must be >= 0, got {}",
                self.grad_tolerance
            )));
        }
        if self.tree_min_leaf == 0 {
            return Err(Error::Config("tree_min_leaf must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Ebr,
    Ecc,
    Emodt,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 3] = [EnsembleKind::Ebr, EnsembleKind::Ecc, EnsembleKind::Emodt];

    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::Ebr => "EBR",
            EnsembleKind::Ecc => "ECC",
            EnsembleKind::Emodt => "EMODT",
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ebr" => Ok(EnsembleKind::Ebr),
            "ecc" => Ok(EnsembleKind::Ecc),
            "emodt" => Ok(EnsembleKind::Emodt),
            _ => Err(Error::Config(format!("unknown ensemble kind `{s}`"))),
        }
    }
}

/// One trained ensemble member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Member {
    /// One logistic model per label.
    BinaryRelevance(Vec<LinearModel>),
    Chain(ClassifierChain),
    Tree(TreeNode),
}

impl Member {
    pub fn relevance(&self, x: &[f64]) -> Result<MarginalVector> {
        match self {
            Member::BinaryRelevance(models) => {
                let probs = models
                    .iter()
                    .map(|m| m.predict_proba(x))
                    .collect::<Result<Vec<_>>>()?;
                MarginalVector::new(probs)
            }
            Member::Chain(chain) => predict_chain(chain, x),
            Member::Tree(tree) => tree.predict(x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    kind: EnsembleKind,
    members: Vec<Member>,
    seed: u64,
    config: LearnerConfig,
    num_features: usize,
    num_labels: usize,
}

const FORMAT_TAG: &str = "mlagg-ensemble";
const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Container<T> {
    format: String,
    version: u32,
    model: T,
}

impl EnsembleModel {
    pub fn new(
        kind: EnsembleKind,
        members: Vec<Member>,
        seed: u64,
        config: LearnerConfig,
        num_features: usize,
        num_labels: usize,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Empty("ensemble"));
        }
        Ok(EnsembleModel {
            kind,
            members,
            seed,
            config,
            num_features,
            num_labels,
        })
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    /// The relevance information of every member for instance `x`, in member order.
    pub fn member_relevance(&self, x: &[f64]) -> Result<Vec<MarginalVector>> {
        Error::check_len(self.num_features, x.len())?;
        self.members.iter().map(|m| m.relevance(x)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let container = Container {
            format: FORMAT_TAG.into(),
            version: FORMAT_VERSION,
            model: self,
        };
        serde_json::to_string(&container).map_err(|e| Error::invalid(format!("serializing model: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let container: Container<EnsembleModel> =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("reading model: {e}")))?;
        if container.format != FORMAT_TAG {
            return Err(Error::Unsupported(format!("model format `{}`", container.format)));
        }
        if container.version != FORMAT_VERSION {
            return Err(Error::Unsupported(format!("model format version {}", container.version)));
        }
        Ok(container.model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

// Seed path tags, so that EBR member 3 and ECC member 3 draw unrelated streams.
const TAG_EBR: u64 = 1;
const TAG_ECC: u64 = 2;
const TAG_EMODT: u64 = 3;
const TAG_ORDER: u64 = 0xC4A1;

fn bootstrap_rows<R: Rng>(n: usize, enabled: bool, rng: &mut R) -> Vec<usize> {
    if enabled {
        (0..n).map(|_| rng.random_range(0..n)).collect()
    } else {
        (0..n).collect()
    }
}

fn check_training_input(data: &Dataset, m: usize, config: &LearnerConfig) -> Result<()> {
    config.validate()?;
    if m == 0 {
        return Err(Error::Config("ensemble size must be >= 1".into()));
    }
    if data.has_missing() {
        return Err(Error::invalid("training features contain missing values; preprocess first"));
    }
    Ok(())
}

fn train_members<F>(data: &Dataset, kind: EnsembleKind, m: usize, config: &LearnerConfig, seed: u64, build: F) -> Result<EnsembleModel>
where
    F: Fn(usize) -> Result<Member> + Sync,
{
    check_training_input(data, m, config)?;
    let members = (0..m).into_par_iter().map(&build).collect::<Result<Vec<_>>>()?;
    EnsembleModel::new(kind, members, seed, config.clone(), data.num_features(), data.num_labels())
}

/// Bagged binary relevance: `M * K` logistic models, each fitted on its own
/// bootstrap sample. Member `j` holds the `j`-th model of every label.
pub fn train_ebr(data: &Dataset, m: usize, config: &LearnerConfig, seed: u64) -> Result<EnsembleModel> {
    train_members(data, EnsembleKind::Ebr, m, config, seed, |j| {
        let models = (0..data.num_labels())
            .map(|k| {
                let mut rng = seeding::rng_for(seed, &[TAG_EBR, j as u64, k as u64]);
                let rows = bootstrap_rows(data.num_instances(), config.bootstrap, &mut rng);
                let sample = data.select(&rows)?;
                train_logistic(sample.features(), &sample.label_column(k), config)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Member::BinaryRelevance(models))
    })
}

/// Ensemble of classifier chains, each with a uniformly drawn label order.
pub fn train_ecc(data: &Dataset, m: usize, config: &LearnerConfig, seed: u64) -> Result<EnsembleModel> {
    train_members(data, EnsembleKind::Ecc, m, config, seed, |j| {
        let mut order_rng = seeding::rng_for(seed, &[TAG_ECC, j as u64, TAG_ORDER]);
        let order = ChainOrder::random(data.num_labels(), &mut order_rng);
        let mut rng = seeding::rng_for(seed, &[TAG_ECC, j as u64]);
        let rows = bootstrap_rows(data.num_instances(), config.bootstrap, &mut rng);
        let sample = data.select(&rows)?;
        Ok(Member::Chain(train_chain(&sample, order, config)?))
    })
}

/// Ensemble of multi-objective decision trees.
pub fn train_emodt(data: &Dataset, m: usize, config: &LearnerConfig, seed: u64) -> Result<EnsembleModel> {
    train_members(data, EnsembleKind::Emodt, m, config, seed, |j| {
        let mut rng = seeding::rng_for(seed, &[TAG_EMODT, j as u64]);
        let rows = bootstrap_rows(data.num_instances(), config.bootstrap, &mut rng);
        let sample = data.select(&rows)?;
        Ok(Member::Tree(train_modt(&sample, config)?))
    })
}

pub fn train_ensemble(kind: EnsembleKind, data: &Dataset, m: usize, config: &LearnerConfig, seed: u64) -> Result<EnsembleModel> {
    match kind {
        EnsembleKind::Ebr => train_ebr(data, m, config, seed),
        EnsembleKind::Ecc => train_ecc(data, m, config, seed),
        EnsembleKind::Emodt => train_emodt(data, m, config, seed),
    }
}
