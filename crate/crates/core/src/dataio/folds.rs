use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding;

const TAG_FOLDS: u64 = 0xF01D;

/// Assignment of every instance to one of `k` folds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    k: usize,
    assignments: Vec<usize>,
    seed: u64,
    repeat_index: usize,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn repeat_index(&self) -> usize {
        self.repeat_index
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] != fold).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Random `k`-fold plans for `n` instances, one per repeat. Each repeat
/// shuffles with its own derived seed, then cuts the permutation into `k`
/// consecutive chunks; the first `n % k` folds get one extra instance.
pub fn split_folds(n: usize, k: usize, seed: u64, repeats: usize) -> Result<Vec<FoldPlan>> {
    if k < 2 {
        return Err(Error::Config(format!("fold count must be >= 2, got {k}")));
    }
    if k > n {
        return Err(Error::Config(format!("fold count {k} exceeds the {n} instances")));
    }
    Ok((0..repeats)
        .map(|r| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut seeding::rng_for(seed, &[TAG_FOLDS, r as u64]));
            let (base, extra) = (n / k, n % k);
            let mut assignments = vec![0; n];
            let mut pos = 0;
            for fold in 0..k {
                let size = base + usize::from(fold < extra);
                for &i in &perm[pos..pos + size] {
                    assignments[i] = fold;
                }
                pos += size;
            }
            FoldPlan {
                k,
                assignments,
                seed,
                repeat_index: r,
            }
        })
        .collect())
}
