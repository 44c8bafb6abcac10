//! Labelings and the probability objects defined over them.
//!
//! A labeling of `K` labels is a [`LabelVector`]; label `k` maps to bit `k`
//! of the integer encoding used by [`JointDistribution`] and by every
//! "smallest encoding wins" tie-break in the crate.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the number of labels of a dense joint table.
pub const MAX_JOINT_LABELS: usize = 24;

/// Joint tables whose mass deviates from 1 by less than this are renormalized;
/// larger deviations are rejected.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-6;

/// Binary relevance indicators for `K` labels.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelVector(Vec<bool>);

impl LabelVector {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Empty("label vector"));
        }
        Ok(LabelVector(bits))
    }

    /// Builds a labeling from 0/1 integers, rejecting anything else.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let bits = bits
            .iter()
            .enumerate()
            .map(|(k, &b)| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::invalid(format!(
                    "label {k} has value {other}, expected 0 or 1"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }

    pub fn zeros(num_labels: usize) -> Self {
        assert!(num_labels > 0, "label vector needs at least one label");
        LabelVector(vec![false; num_labels])
    }

    /// Decodes `code` (bit `k` = label `k`) into a labeling of `num_labels` labels.
    pub fn from_code(code: u64, num_labels: usize) -> Self {
        assert!((1..=64).contains(&num_labels));
        LabelVector((0..num_labels).map(|k| code >> k & 1 == 1).collect())
    }

    /// Integer encoding, available for `K <= 64`.
    pub fn code(&self) -> Option<u64> {
        if self.0.len() > 64 {
            return None;
        }
        Some(
            self.0
                .iter()
                .enumerate()
                .fold(0u64, |acc, (k, &b)| acc | (u64::from(b) << k)),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> bool {
        self.0[k]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn count_relevant(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.0.iter().map(|&b| u8::from(b)).collect()
    }

    /// Compares the integer encodings without materializing them, so it works
    /// for any `K`. Both vectors must have the same length.
    pub fn cmp_encoding(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.len(), other.len());
        for k in (0..self.len()).rev() {
            match self.0[k].cmp(&other.0[k]) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl fmt::Debug for LabelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LabelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, b) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            f.write_str(if *b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

/// Per-label relevance probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalVector(Vec<f64>);

impl MarginalVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Empty("marginal vector"));
        }
        if let Some((k, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(Error::invalid(format!(
                "marginal probability {p} for label {k} is outside [0, 1]"
            )));
        }
        Ok(MarginalVector(probs))
    }

    /// Degenerate marginals of a known labeling.
    pub fn from_labels(labels: &LabelVector) -> Self {
        MarginalVector(labels.iter().map(|b| if b { 1.0 } else { 0.0 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> f64 {
        self.0[k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Dense probability table over all `2^K` labelings, indexed by encoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    num_labels: usize,
    mass: Vec<f64>,
}

impl JointDistribution {
    /// Validates and, for small rounding drift, renormalizes `mass`.
    pub fn new(num_labels: usize, mut mass: Vec<f64>) -> Result<Self> {
        check_joint_cap(num_labels)?;
        Error::check_len(1usize << num_labels, mass.len())?;
        if let Some((i, m)) = mass
            .iter()
            .enumerate()
            .find(|(_, m)| !m.is_finite() || **m < 0.0)
        {
            return Err(Error::invalid(format!(
                "joint mass {m} at labeling {i} is not a nonnegative number"
            )));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() >= RENORMALIZE_TOLERANCE {
            return Err(Error::invalid(format!(
                "joint mass sums to {total}, not 1"
            )));
        }
        if total != 1.0 {
            mass.iter_mut().for_each(|m| *m /= total);
        }
        Ok(JointDistribution { num_labels, mass })
    }

    /// Builds a table from `(labeling, probability)` pairs; repeated labelings accumulate.
    pub fn from_support<'a, I>(num_labels: usize, support: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a LabelVector, f64)>,
    {
        check_joint_cap(num_labels)?;
        let mut mass = vec![0.0; 1usize << num_labels];
        for (y, p) in support {
            Error::check_len(num_labels, y.len())?;
            mass[y.code().expect("K <= 24") as usize] += p;
        }
        Self::new(num_labels, mass)
    }

    pub fn point_mass(y: &LabelVector) -> Result<Self> {
        Self::from_support(y.len(), [(y, 1.0)])
    }

    pub fn uniform(num_labels: usize) -> Result<Self> {
        check_joint_cap(num_labels)?;
        let n = 1usize << num_labels;
        Self::new(num_labels, vec![1.0 / n as f64; n])
    }

    /// The product distribution with the given marginals.
    pub fn independent(marginals: &MarginalVector) -> Result<Self> {
        let k = marginals.len();
        check_joint_cap(k)?;
        let mut mass = vec![1.0];
        for &p in marginals.as_slice() {
            let mut next = Vec::with_capacity(mass.len() * 2);
            next.extend(mass.iter().map(|m| m * (1.0 - p)));
            next.extend(mass.iter().map(|m| m * p));
            mass = next;
        }
        Self::new(k, mass)
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn prob(&self, y: &LabelVector) -> f64 {
        y.code()
            .filter(|_| y.len() == self.num_labels)
            .map_or(0.0, |c| self.mass[c as usize])
    }

    /// Labelings with nonzero mass, as `(encoding, probability)`.
    pub fn support(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > 0.0)
            .map(|(c, m)| (c as u64, *m))
    }
}

pub(crate) fn check_joint_cap(num_labels: usize) -> Result<()> {
    if num_labels == 0 {
        return Err(Error::Empty("joint distribution"));
    }
    if num_labels > MAX_JOINT_LABELS {
        return Err(Error::CapExceeded {
            what: "joint distribution",
            cap: MAX_JOINT_LABELS,
            actual: num_labels,
        });
    }
    Ok(())
}
