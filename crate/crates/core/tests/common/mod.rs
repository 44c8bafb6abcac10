//! Naive oracles shared by the integration tests and the acceptance harness.
//! Everything here enumerates; nothing calls the library's own risk code.

#![allow(dead_code)]

use mlagg::{JointDistribution, LossKind, MarginalVector};
use rand::Rng;

pub fn hamming(y: u64, yhat: u64, k: usize) -> f64 {
    f64::from((y ^ yhat).count_ones()) / k as f64
}

pub fn subset(y: u64, yhat: u64) -> f64 {
    if y == yhat {
        0.0
    } else {
        1.0
    }
}

/// Instance-wise F1 with F(empty, empty) = 1.
pub fn f1(y: u64, yhat: u64) -> f64 {
    let denom = y.count_ones() + yhat.count_ones();
    if denom == 0 {
        1.0
    } else {
        2.0 * f64::from((y & yhat).count_ones()) / f64::from(denom)
    }
}

pub fn score(loss: LossKind, y: u64, yhat: u64, k: usize) -> f64 {
    match loss {
        LossKind::Hamming => hamming(y, yhat, k),
        LossKind::SubsetZeroOne => subset(y, yhat),
        LossKind::FMeasure => f1(y, yhat),
    }
}

pub fn expected(mass: &[f64], k: usize, yhat: u64, loss: LossKind) -> f64 {
    mass.iter().enumerate().map(|(y, m)| m * score(loss, y as u64, yhat, k)).sum()
}

/// Best attainable expected value over all `2^K` predictions.
pub fn optimum(mass: &[f64], k: usize, loss: LossKind) -> f64 {
    let values = (0..1u64 << k).map(|c| expected(mass, k, c, loss));
    if loss == LossKind::FMeasure {
        values.fold(f64::NEG_INFINITY, f64::max)
    } else {
        values.fold(f64::INFINITY, f64::min)
    }
}

/// Product distribution, built outcome by outcome.
pub fn independent_mass(p: &[f64]) -> Vec<f64> {
    (0..1u64 << p.len())
        .map(|y| {
            p.iter()
                .enumerate()
                .map(|(i, &pi)| if y >> i & 1 == 1 { pi } else { 1.0 - pi })
                .product()
        })
        .collect()
}

/// A random joint table: sparse support with probability 1/2, otherwise dense.
pub fn random_joint<R: Rng>(k: usize, rng: &mut R) -> JointDistribution {
    let n = 1usize << k;
    let sparse = rng.random_bool(0.5);
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if sparse && rng.random_bool(0.8) {
                0.0
            } else {
                -(1.0 - rng.random::<f64>()).ln()
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.random_range(0..n)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    JointDistribution::new(k, w.iter().map(|x| x / total).collect()).unwrap()
}

/// Random marginals; a quarter of the vectors are drawn on a coarse grid to provoke ties.
pub fn random_marginals<R: Rng>(k: usize, rng: &mut R) -> MarginalVector {
    let coarse = rng.random_bool(0.25);
    MarginalVector::new(
        (0..k)
            .map(|_| if coarse { f64::from(rng.random_range(0..=8u32)) / 8.0 } else { rng.random::<f64>() })
            .collect(),
    )
    .unwrap()
}

/// `m` members over `k` labels.
pub fn random_members<R: Rng>(m: usize, k: usize, rng: &mut R) -> Vec<MarginalVector> {
    (0..m).map(|_| random_marginals(k, rng)).collect()
}

/// Label-wise mean of member marginals, thresholded strictly at 1/2, in bits.
pub fn mean_threshold(members: &[MarginalVector]) -> Vec<u8> {
    let k = members[0].len();
    (0..k)
        .map(|j| {
            let s: f64 = members.iter().map(|p| p.get(j)).sum();
            u8::from(s / members.len() as f64 > 0.5)
        })
        .collect()
}

/// Strict majority of hard per-member votes `p > 1/2`, in bits.
pub fn vote_majority(members: &[MarginalVector]) -> Vec<u8> {
    let k = members[0].len();
    (0..k)
        .map(|j| {
            let votes = members.iter().filter(|p| p.get(j) > 0.5).count();
            u8::from(2 * votes > members.len())
        })
        .collect()
}
