//! Classifier chains with hard feed-forward of earlier predictions.

use ndarray::{s, Array2};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{train_logistic, LearnerConfig, LinearModel};
use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::labels::MarginalVector;

/// A permutation of the label indices `0..K`; position `i` holds the label
/// predicted at step `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ChainOrder(Vec<usize>);

impl ChainOrder {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        if perm.is_empty() {
            return Err(Error::Empty("chain order"));
        }
        let mut seen = vec![false; perm.len()];
        for &label in &perm {
            if label >= perm.len() || std::mem::replace(&mut seen[label], true) {
                return Err(Error::invalid(format!("{perm:?} is not a permutation of 0..{}", perm.len())));
            }
        }
        Ok(ChainOrder(perm))
    }

    pub fn identity(num_labels: usize) -> Self {
        ChainOrder((0..num_labels).collect())
    }

    pub fn random<R: Rng>(num_labels: usize, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..num_labels).collect();
        perm.shuffle(rng);
        ChainOrder(perm)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<usize>> for ChainOrder {
    type Error = Error;

    fn try_from(perm: Vec<usize>) -> Result<Self> {
        ChainOrder::new(perm)
    }
}

impl From<ChainOrder> for Vec<usize> {
    fn from(order: ChainOrder) -> Self {
        order.0
    }
}

/// `models[i]` predicts label `order[i]` from the `d` input features followed
/// by the 0/1 values of labels `order[0..i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierChain {
    order: ChainOrder,
    models: Vec<LinearModel>,
}

impl ClassifierChain {
    pub fn new(order: ChainOrder, models: Vec<LinearModel>) -> Result<Self> {
        Error::check_len(order.len(), models.len())?;
        let d = models[0].num_features();
        for (i, m) in models.iter().enumerate() {
            if m.num_features() != d + i {
                return Err(Error::DimensionMismatch {
                    expected: d + i,
                    actual: m.num_features(),
                });
            }
        }
        Ok(ClassifierChain { order, models })
    }

    pub fn order(&self) -> &ChainOrder {
        &self.order
    }

    pub fn models(&self) -> &[LinearModel] {
        &self.models
    }

    pub fn num_features(&self) -> usize {
        self.models[0].num_features()
    }
}

/// Trains one chain on the ground-truth labels of the preceding steps.
pub fn train_chain(data: &Dataset, order: ChainOrder, config: &LearnerConfig) -> Result<ClassifierChain> {
    Error::check_len(data.num_labels(), order.len())?;
    let (n, d) = (data.num_instances(), data.num_features());
    let k = order.len();
    let mut augmented = Array2::<f64>::zeros((n, d + k));
    augmented.slice_mut(s![.., ..d]).assign(&data.features());
    for (step, &label) in order.as_slice().iter().enumerate() {
        for (i, y) in data.labels().iter().enumerate() {
            augmented[[i, d + step]] = if y.get(label) { 1.0 } else { 0.0 };
        }
    }
    let models = order
        .as_slice()
        .iter()
        .enumerate()
        .map(|(step, &label)| train_logistic(augmented.slice(s![.., ..d + step]), &data.label_column(label), config))
        .collect::<Result<Vec<_>>>()?;
    ClassifierChain::new(order, models)
}

/// Walks the chain, feeding each step the hard `q > 1/2` decisions of the
/// earlier steps. Output is in natural label order.
pub fn predict_chain(chain: &ClassifierChain, x: &[f64]) -> Result<MarginalVector> {
    Error::check_len(chain.num_features(), x.len())?;
    let k = chain.order.len();
    let mut input = Vec::with_capacity(x.len() + k);
    input.extend_from_slice(x);
    let mut q = vec![0.0; k];
    for (model, &label) in chain.models.iter().zip(chain.order.as_slice()) {
        let p = model.predict_proba(&input)?;
        q[label] = p;
        input.push(if p > 0.5 { 1.0 } else { 0.0 });
    }
    MarginalVector::new(q)
}
