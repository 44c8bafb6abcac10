//! Bayes-optimal predictions from relevance information.
//!
//! * Hamming loss: threshold the marginals.
//! * Subset 0/1 loss: the joint mode.
//! * F-measure: under label independence, the best of the `K + 1` "top-h"
//!   label sets, each scored exactly with a Poisson-binomial dynamic program.
//!
//! [`bayes_optimal_bruteforce`] enumerates every candidate against every
//! outcome and is only meant as a small-`K` oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{check_joint_cap, JointDistribution, LabelVector, MarginalVector};
use crate::loss::{expected_loss_code, LossKind};

/// Largest `K` accepted by [`bayes_optimal_bruteforce`].
pub const MAX_BRUTEFORCE_LABELS: usize = 14;

/// Default threshold for the Hamming rule.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictorSpec {
    pub loss: LossKind,
    pub threshold: f64,
}

impl PredictorSpec {
    pub fn new(loss: LossKind, threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::invalid(format!("threshold {threshold} is not in (0, 1)")));
        }
        Ok(PredictorSpec { loss, threshold })
    }

    pub fn for_loss(loss: LossKind) -> Self {
        PredictorSpec {
            loss,
            threshold: DEFAULT_THRESHOLD,
        }
    }

    /// Loss-minimizing prediction from marginals, assuming label independence
    /// where the loss needs more than marginals.
    pub fn predict(&self, p: &MarginalVector) -> LabelVector {
        match self.loss {
            LossKind::Hamming | LossKind::SubsetZeroOne => predict_hamming(p, self.threshold),
            LossKind::FMeasure => predict_f_independent(p),
        }
    }
}

/// `yhat_k = 1` iff `p_k > threshold`; a marginal equal to the threshold maps to 0.
pub fn predict_hamming(p: &MarginalVector, threshold: f64) -> LabelVector {
    LabelVector::new(p.as_slice().iter().map(|&pk| pk > threshold).collect())
        .expect("marginals are nonempty")
}

/// Most probable labeling; ties go to the smallest encoding.
pub fn predict_subset_mode(joint: &JointDistribution) -> LabelVector {
    let (best, _) = joint
        .mass()
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |(bi, bm), (i, &m)| {
            if m > bm {
                (i, m)
            } else {
                (bi, bm)
            }
        });
    LabelVector::from_code(best as u64, joint.num_labels())
}

/// Distribution of the number of successes among independent Bernoulli
/// trials, built by convolution from the largest probability down.
pub fn poisson_binomial(probs: &[f64]) -> Vec<f64> {
    let mut sorted = probs.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut pmf = Vec::with_capacity(sorted.len() + 1);
    pmf.push(1.0);
    for p in sorted {
        pmf.push(0.0);
        for i in (1..pmf.len()).rev() {
            pmf[i] = pmf[i] * (1.0 - p) + pmf[i - 1] * p;
        }
        pmf[0] *= 1.0 - p;
    }
    pmf
}

/// Exact `E[F(Y, yhat)]` when the labels are independent with marginals `p`.
pub fn expected_f_independent(p: &MarginalVector, yhat: &LabelVector) -> Result<f64> {
    Error::check_len(p.len(), yhat.len())?;
    let (inside, outside): (Vec<_>, Vec<_>) = p
        .as_slice()
        .iter()
        .zip(yhat.iter())
        .map(|(&pk, b)| (pk, b))
        .partition(|(_, b)| *b);
    let inside: Vec<f64> = inside.into_iter().map(|(pk, _)| pk).collect();
    let outside: Vec<f64> = outside.into_iter().map(|(pk, _)| pk).collect();
    Ok(expected_f_split(&inside, &outside))
}

/// `inside` holds the marginals of predicted labels, `outside` the rest.
fn expected_f_split(inside: &[f64], outside: &[f64]) -> f64 {
    let h = inside.len();
    let hits = poisson_binomial(inside);
    let misses = poisson_binomial(outside);
    let mut total = 0.0;
    for (a, pa) in hits.iter().enumerate() {
        if *pa == 0.0 {
            continue;
        }
        for (b, pb) in misses.iter().enumerate() {
            let denom = h + a + b;
            let f = if denom == 0 {
                1.0
            } else {
                2.0 * a as f64 / denom as f64
            };
            total += f * pa * pb;
        }
    }
    total
}

/// F-maximizing prediction under label independence.
///
/// Only the sets made of the `h` most probable labels are scored
/// (`h = 0..=K`, ties in probability ordered by label index); the first
/// best-scoring `h` wins.
pub fn predict_f_independent(p: &MarginalVector) -> LabelVector {
    let k = p.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| p.get(b).total_cmp(&p.get(a)).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| p.get(i)).collect();

    let mut best_h = 0;
    let mut best = f64::NEG_INFINITY;
    for h in 0..=k {
        let value = expected_f_split(&sorted[..h], &sorted[h..]);
        if value > best {
            best = value;
            best_h = h;
        }
    }
    let mut bits = vec![false; k];
    for &i in &order[..best_h] {
        bits[i] = true;
    }
    LabelVector::new(bits).expect("marginals are nonempty")
}

/// Exhaustive risk minimizer over all `2^K` predictions. Ties go to the
/// smallest encoding.
pub fn bayes_optimal_bruteforce(joint: &JointDistribution, loss: LossKind) -> Result<LabelVector> {
    let k = joint.num_labels();
    check_joint_cap(k)?;
    if k > MAX_BRUTEFORCE_LABELS {
        return Err(Error::CapExceeded {
            what: "brute-force risk minimization",
            cap: MAX_BRUTEFORCE_LABELS,
            actual: k,
        });
    }
    let mut best_code = 0u64;
    let mut best = if loss.is_utility() { f64::NEG_INFINITY } else { f64::INFINITY };
    for code in 0..(1u64 << k) {
        let value = expected_loss_code(joint, code, loss);
        let better = if loss.is_utility() { value > best } else { value < best };
        if better {
            best = value;
            best_code = code;
        }
    }
    Ok(LabelVector::from_code(best_code, k))
}
