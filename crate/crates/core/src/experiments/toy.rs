//! The three-label toy problem on which label-wise voting and mode voting disagree.
//!
//! Ground truth puts 1/4 on `(0,0,0)` and 3/16 on each of `(1,1,1)`,
//! `(0,1,1)`, `(1,0,1)` and `(1,1,0)`. Every marginal is 9/16, so
//! thresholding (and label-wise voting over members sampled from this table)
//! yields `(1,1,1)`, which is optimal for Hamming loss but not for subset 0/1
//! loss. The mode `(0,0,0)` is the subset 0/1 optimum.

use ndarray::Array2;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::aggregate::{ptc_label_wise, ptc_mode};
use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::labels::{JointDistribution, LabelVector};
use crate::loss::{expected_loss, LossKind};
use crate::seeding;

pub const NUM_LABELS: usize = 3;

/// Support of the table as `(code, sixteenths)`.
const TABLE: [(u64, u32); 5] = [(0b000, 4), (0b111, 3), (0b110, 3), (0b101, 3), (0b011, 3)];

pub fn ground_truth() -> JointDistribution {
    let mut mass = vec![0.0; 1 << NUM_LABELS];
    for (code, w) in TABLE {
        mass[code as usize] = f64::from(w) / 16.0;
    }
    JointDistribution::new(NUM_LABELS, mass).expect("table sums to one")
}

/// One draw from the ground-truth table.
pub fn sample<R: Rng>(rng: &mut R) -> LabelVector {
    let mut u = rng.random_range(0..16u32);
    for (code, w) in TABLE {
        if u < w {
            return LabelVector::from_code(code, NUM_LABELS);
        }
        u -= w;
    }
    unreachable!("weights sum to 16")
}

/// `m` independent member predictions drawn from the table.
pub fn sample_members<R: Rng>(m: usize, rng: &mut R) -> Vec<LabelVector> {
    (0..m).map(|_| sample(rng)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectedLosses {
    pub hamming: f64,
    pub subset_zero_one: f64,
}

impl ExpectedLosses {
    pub fn of(y: &LabelVector) -> Self {
        let truth = ground_truth();
        ExpectedLosses {
            hamming: expected_loss(&truth, y, LossKind::Hamming).expect("K = 3"),
            subset_zero_one: expected_loss(&truth, y, LossKind::SubsetZeroOne).expect("K = 3"),
        }
    }
}

/// One simulated ensemble of `members` sampled predictions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToyOutcome {
    pub members: usize,
    pub seed: u64,
    pub label_wise: LabelVector,
    pub mode: LabelVector,
    pub label_wise_expected: ExpectedLosses,
    pub mode_expected: ExpectedLosses,
}

pub fn simulate_toy(m: usize, seed: u64) -> Result<ToyOutcome> {
    if m == 0 {
        return Err(Error::Config("toy ensemble size must be >= 1".into()));
    }
    let members = sample_members(m, &mut seeding::rng_for(seed, &[]));
    let label_wise = ptc_label_wise(&members)?;
    let mode = ptc_mode(&members)?;
    Ok(ToyOutcome {
        members: m,
        seed,
        label_wise_expected: ExpectedLosses::of(&label_wise),
        mode_expected: ExpectedLosses::of(&mode),
        label_wise,
        mode,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToyTrials {
    pub members: usize,
    pub trials: usize,
    pub seed: u64,
    /// Trials in which the mode was `(0,0,0)`.
    pub mode_all_zero: usize,
    /// Trials in which label-wise voting gave `(1,1,1)`.
    pub label_wise_all_one: usize,
    pub outcomes: Vec<ToyOutcome>,
}

impl ToyTrials {
    pub fn mode_frequency(&self) -> f64 {
        self.mode_all_zero as f64 / self.trials as f64
    }

    pub fn label_wise_frequency(&self) -> f64 {
        self.label_wise_all_one as f64 / self.trials as f64
    }
}

/// Repeats [`simulate_toy`] with seeds derived from `seed`.
pub fn run_trials(m: usize, trials: usize, seed: u64) -> Result<ToyTrials> {
    if trials == 0 {
        return Err(Error::Config("trial count must be >= 1".into()));
    }
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| simulate_toy(m, seeding::derive_seed(seed, &[t as u64])))
        .collect::<Result<Vec<_>>>()?;
    let zero = LabelVector::zeros(NUM_LABELS);
    let ones = LabelVector::from_code(0b111, NUM_LABELS);
    Ok(ToyTrials {
        members: m,
        trials,
        seed,
        mode_all_zero: outcomes.iter().filter(|o| o.mode == zero).count(),
        label_wise_all_one: outcomes.iter().filter(|o| o.label_wise == ones).count(),
        outcomes,
    })
}

/// A learnable dataset whose labels follow the toy table: feature `k` is the
/// value of label `k` plus Gaussian-like noise, and two further features are pure noise.
pub fn toy_dataset(n: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Empty("toy dataset"));
    }
    let mut rng = seeding::rng_for(seed, &[0x70]);
    let labels = sample_members(n, &mut rng);
    let mut x = Array2::<f64>::zeros((n, NUM_LABELS + 2));
    for (i, y) in labels.iter().enumerate() {
        for j in 0..NUM_LABELS + 2 {
            // Sum of uniforms: cheap, bounded, roughly bell-shaped.
            let e: f64 = (0..4).map(|_| rng.random_range(-0.5..0.5)).sum();
            let signal = if j < NUM_LABELS && y.get(j) { 1.0 } else { 0.0 };
            x[[i, j]] = signal + noise * e;
        }
    }
    Ok(Dataset::from_parts(x, labels)?.with_provenance(format!("toy:n={n},noise={noise},seed={seed}")))
}
