//! Hamming loss, subset 0/1 loss and the instance-wise F-measure, plus
//! expected loss and marginalization over dense joint tables.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{JointDistribution, LabelVector, MarginalVector};

/// Target performance measure. `FMeasure` is a utility, the others are losses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Hamming,
    SubsetZeroOne,
    FMeasure,
}

impl LossKind {
    pub const ALL: [LossKind; 3] = [LossKind::Hamming, LossKind::SubsetZeroOne, LossKind::FMeasure];

    /// True when higher values are better.
    pub fn is_utility(self) -> bool {
        matches!(self, LossKind::FMeasure)
    }

    pub fn name(self) -> &'static str {
        match self {
            LossKind::Hamming => "hamming",
            LossKind::SubsetZeroOne => "subset01",
            LossKind::FMeasure => "f1",
        }
    }

    pub fn evaluate(self, y: &LabelVector, yhat: &LabelVector) -> Result<f64> {
        match self {
            LossKind::Hamming => hamming_loss(y, yhat),
            LossKind::SubsetZeroOne => subset_zero_one_loss(y, yhat),
            LossKind::FMeasure => f_measure(y, yhat),
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_', ' ', '/'], "").as_str() {
            "hamming" => Ok(LossKind::Hamming),
            "subset01" | "subsetzeroone" | "subset" | "01" => Ok(LossKind::SubsetZeroOne),
            "f1" | "f" | "fmeasure" => Ok(LossKind::FMeasure),
            _ => Err(Error::Config(format!("unknown loss `{s}`"))),
        }
    }
}

pub fn hamming_loss(y: &LabelVector, yhat: &LabelVector) -> Result<f64> {
    Error::check_len(y.len(), yhat.len())?;
    let diff = y.iter().zip(yhat.iter()).filter(|(a, b)| a != b).count();
    Ok(diff as f64 / y.len() as f64)
}

pub fn subset_zero_one_loss(y: &LabelVector, yhat: &LabelVector) -> Result<f64> {
    Error::check_len(y.len(), yhat.len())?;
    Ok(if y == yhat { 0.0 } else { 1.0 })
}

/// Instance-wise F1. Two all-zero vectors score 1.
pub fn f_measure(y: &LabelVector, yhat: &LabelVector) -> Result<f64> {
    Error::check_len(y.len(), yhat.len())?;
    let both = y.iter().zip(yhat.iter()).filter(|(a, b)| *a && *b).count();
    Ok(f_from_counts(both, y.count_relevant(), yhat.count_relevant()))
}

#[inline]
pub(crate) fn f_from_counts(both: usize, truth: usize, predicted: usize) -> f64 {
    if truth + predicted == 0 {
        1.0
    } else {
        2.0 * both as f64 / (truth + predicted) as f64
    }
}

/// Loss between two encoded labelings of `k` labels.
#[inline]
pub(crate) fn loss_on_codes(kind: LossKind, y: u64, yhat: u64, k: usize) -> f64 {
    match kind {
        LossKind::Hamming => (y ^ yhat).count_ones() as f64 / k as f64,
        LossKind::SubsetZeroOne => {
            if y == yhat {
                0.0
            } else {
                1.0
            }
        }
        LossKind::FMeasure => f_from_counts(
            (y & yhat).count_ones() as usize,
            y.count_ones() as usize,
            yhat.count_ones() as usize,
        ),
    }
}

/// `sum_y loss(y, yhat) p(y)` by enumeration; expected utility for `FMeasure`.
pub fn expected_loss(joint: &JointDistribution, yhat: &LabelVector, loss: LossKind) -> Result<f64> {
    Error::check_len(joint.num_labels(), yhat.len())?;
    let code = yhat.code().expect("joint tables have K <= 24");
    Ok(expected_loss_code(joint, code, loss))
}

pub(crate) fn expected_loss_code(joint: &JointDistribution, yhat: u64, loss: LossKind) -> f64 {
    let k = joint.num_labels();
    joint
        .support()
        .map(|(y, p)| loss_on_codes(loss, y, yhat, k) * p)
        .sum()
}

/// Per-label marginals of a joint table.
pub fn marginalize(joint: &JointDistribution) -> MarginalVector {
    let k = joint.num_labels();
    let mut probs = vec![0.0; k];
    for (code, p) in joint.support() {
        for (label, acc) in probs.iter_mut().enumerate() {
            if code >> label & 1 == 1 {
                *acc += p;
            }
        }
    }
    probs.iter_mut().for_each(|p| *p = p.clamp(0.0, 1.0));
    MarginalVector::new(probs).expect("clamped into [0, 1]")
}
