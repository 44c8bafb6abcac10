//! Ensemble aggregation.
//!
//! Two loss-oblivious votes ([`gmv`], [`bmv`]) and three loss-aware pipelines:
//! combine-then-predict averages the members' marginals and applies the
//! target loss's prediction rule once; the two predict-then-combine variants
//! apply the rule per member and then vote label-wise ([`ptc_label_wise`]) or
//! take the most frequent prediction ([`ptc_mode`]).

mod matrix;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use matrix::{read_member_matrix, write_predictions, MemberMatrix};

use crate::error::{Error, Result};
use crate::labels::{check_joint_cap, JointDistribution, LabelVector, MarginalVector};
use crate::learners::EnsembleModel;
use crate::loss::LossKind;
use crate::riskmin::{predict_subset_mode, PredictorSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrategyKind {
    #[serde(rename = "gmv")]
    Gmv,
    #[serde(rename = "bmv")]
    Bmv,
    #[serde(rename = "ctp")]
    Ctp,
    #[serde(rename = "ptc_lw")]
    PtcLabelWise,
    #[serde(rename = "ptc_mode")]
    PtcMode,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::Gmv,
        StrategyKind::Bmv,
        StrategyKind::Ctp,
        StrategyKind::PtcLabelWise,
        StrategyKind::PtcMode,
    ];

    /// Short identifier used in files and on the command line.
    pub fn id(self) -> &'static str {
        match self {
            StrategyKind::Gmv => "gmv",
            StrategyKind::Bmv => "bmv",
            StrategyKind::Ctp => "ctp",
            StrategyKind::PtcLabelWise => "ptc_lw",
            StrategyKind::PtcMode => "ptc_mode",
        }
    }

    /// Label used in rendered tables.
    pub fn label(self) -> &'static str {
        match self {
            StrategyKind::Gmv => "GMV",
            StrategyKind::Bmv => "BMV",
            StrategyKind::Ctp => "CTP",
            StrategyKind::PtcLabelWise => "PTC-lw",
            StrategyKind::PtcMode => "PTC-mode",
        }
    }

    /// GMV and BMV ignore the target loss.
    pub fn is_loss_aware(self) -> bool {
        !matches!(self, StrategyKind::Gmv | StrategyKind::Bmv)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "gmv" => Ok(StrategyKind::Gmv),
            "bmv" => Ok(StrategyKind::Bmv),
            "ctp" => Ok(StrategyKind::Ctp),
            "ptc_lw" | "ptc_label_wise" => Ok(StrategyKind::PtcLabelWise),
            "ptc_mode" => Ok(StrategyKind::PtcMode),
            _ => Err(Error::Config(format!("unknown strategy `{s}`"))),
        }
    }
}

/// An aggregation strategy together with the loss it targets. GMV and BMV
/// carry the loss only to label their evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub target_loss: LossKind,
}

impl Strategy {
    pub fn new(kind: StrategyKind, target_loss: LossKind) -> Self {
        Strategy { kind, target_loss }
    }

    /// Aggregates one instance's member relevance into a prediction.
    pub fn apply(&self, members: &[MarginalVector]) -> Result<LabelVector> {
        check_members(members)?;
        let rule = PredictorSpec::for_loss(self.target_loss);
        match self.kind {
            StrategyKind::Gmv => gmv(members),
            StrategyKind::Bmv => bmv(&per_member(members, PredictorSpec::for_loss(LossKind::Hamming))),
            StrategyKind::Ctp => Ok(rule.predict(&ctp_mean_marginals(members)?)),
            StrategyKind::PtcLabelWise => ptc_label_wise(&per_member(members, rule)),
            StrategyKind::PtcMode => ptc_mode(&per_member(members, rule)),
        }
    }
}

fn per_member(members: &[MarginalVector], rule: PredictorSpec) -> Vec<LabelVector> {
    members.iter().map(|p| rule.predict(p)).collect()
}

fn check_members<T>(members: &[T]) -> Result<()>
where
    T: HasLen,
{
    let first = members.first().ok_or(Error::Empty("member set"))?;
    for m in &members[1..] {
        Error::check_len(first.len(), m.len())?;
    }
    Ok(())
}

trait HasLen {
    fn len(&self) -> usize;
}

impl HasLen for MarginalVector {
    fn len(&self) -> usize {
        MarginalVector::len(self)
    }
}

impl HasLen for LabelVector {
    fn len(&self) -> usize {
        LabelVector::len(self)
    }
}

/// Sum of member marginals per label. Each column is summed in sorted order so
/// the result does not depend on the order of the members.
fn marginal_sums(members: &[MarginalVector]) -> Vec<f64> {
    let mut column = Vec::with_capacity(members.len());
    (0..members[0].len())
        .map(|k| {
            column.clear();
            column.extend(members.iter().map(|m| m.get(k)));
            column.sort_by(f64::total_cmp);
            column.iter().sum()
        })
        .collect()
}

/// Label-wise arithmetic mean of the members' marginals.
pub fn ctp_mean_marginals(members: &[MarginalVector]) -> Result<MarginalVector> {
    check_members(members)?;
    let m = members.len() as f64;
    let mean = marginal_sums(members)
        .into_iter()
        .map(|s| (s / m).clamp(0.0, 1.0))
        .collect();
    MarginalVector::new(mean)
}

/// Entrywise mean of joint tables.
pub fn ctp_mean_joint(members: &[JointDistribution]) -> Result<JointDistribution> {
    let first = members.first().ok_or(Error::Empty("member set"))?;
    let k = first.num_labels();
    check_joint_cap(k)?;
    let mut mass = vec![0.0; 1usize << k];
    for j in members {
        Error::check_len(k, j.num_labels())?;
        for (acc, p) in mass.iter_mut().zip(j.mass()) {
            *acc += p;
        }
    }
    let total: f64 = mass.iter().sum();
    mass.iter_mut().for_each(|p| *p /= total);
    JointDistribution::new(k, mass)
}

/// Subset 0/1 prediction from joint-valued relevance: mode of the averaged joint.
pub fn ctp_joint_mode(members: &[JointDistribution]) -> Result<LabelVector> {
    Ok(predict_subset_mode(&ctp_mean_joint(members)?))
}

/// General majority vote: label `k` is relevant when the summed confidence for
/// relevance exceeds the summed confidence against it, `sum p > sum (1 - p)`.
/// Ties go to 0.
pub fn gmv(members: &[MarginalVector]) -> Result<LabelVector> {
    check_members(members)?;
    let m = members.len() as f64;
    // `2 * sum > M` rather than comparing two rounded sums, so the vote agrees
    // bit-for-bit with thresholding the mean at 1/2.
    LabelVector::new(marginal_sums(members).into_iter().map(|s| 2.0 * s > m).collect())
}

/// Binary majority vote per label. Ties go to 0.
pub fn bmv(members: &[LabelVector]) -> Result<LabelVector> {
    check_members(members)?;
    let m = members.len();
    let ones = relevant_counts(members);
    LabelVector::new(ones.into_iter().map(|c| 2 * c > m).collect())
}

/// Label-wise majority over loss-tailored member predictions. Same vote as [`bmv`].
pub fn ptc_label_wise(members: &[LabelVector]) -> Result<LabelVector> {
    bmv(members)
}

fn relevant_counts(members: &[LabelVector]) -> Vec<usize> {
    let mut ones = vec![0usize; members[0].len()];
    for y in members {
        for (c, b) in ones.iter_mut().zip(y.iter()) {
            *c += usize::from(b);
        }
    }
    ones
}

/// Most frequent member prediction.
///
/// Ties in frequency go to the candidate agreeing with the most individual
/// member votes, `s(y) = sum_k sum_j [y_k = y_jk]`; remaining ties go to the
/// smallest encoding.
pub fn ptc_mode(members: &[LabelVector]) -> Result<LabelVector> {
    check_members(members)?;
    let m = members.len();
    let ones = relevant_counts(members);
    let mut freq: HashMap<&LabelVector, usize> = HashMap::new();
    for y in members {
        *freq.entry(y).or_default() += 1;
    }
    let score = |y: &LabelVector| -> usize {
        y.iter()
            .zip(&ones)
            .map(|(b, &c)| if b { c } else { m - c })
            .sum()
    };
    let best = freq
        .into_iter()
        .map(|(y, count)| (count, score(y), y))
        .max_by(|a, b| {
            a.0.cmp(&b.0)
                .then(a.1.cmp(&b.1))
                .then_with(|| b.2.cmp_encoding(a.2))
        })
        .expect("nonempty member set");
    Ok(best.2.clone())
}

/// Predicts one instance with a trained ensemble.
pub fn ensemble_predict(ensemble: &EnsembleModel, x: &[f64], strategy: Strategy) -> Result<LabelVector> {
    strategy.apply(&ensemble.member_relevance(x)?)
}
