//! Rank-based comparison of several methods over several datasets.

use serde::Serialize;

use crate::error::{Error, Result};

/// Significance levels with embedded critical values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Alpha {
    #[serde(rename = "0.05")]
    P05,
    #[serde(rename = "0.10")]
    P10,
}

impl Alpha {
    pub fn from_f64(alpha: f64) -> Result<Self> {
        if (alpha - 0.05).abs() < 1e-12 {
            Ok(Alpha::P05)
        } else if (alpha - 0.10).abs() < 1e-12 {
            Ok(Alpha::P10)
        } else {
            Err(Error::Unsupported(format!("significance level {alpha}; use 0.05 or 0.10")))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Alpha::P05 => 0.05,
            Alpha::P10 => 0.10,
        }
    }
}

// Upper quantiles of the chi-square distribution, df = 1..=9.
const CHI2_05: [f64; 9] = [3.841, 5.991, 7.815, 9.488, 11.070, 12.592, 14.067, 15.507, 16.919];
const CHI2_10: [f64; 9] = [2.706, 4.605, 6.251, 7.779, 9.236, 10.645, 12.017, 13.362, 14.684];

// Nemenyi critical values q_alpha for m = 2..=10 methods: the studentized
// range quantile with infinite degrees of freedom divided by sqrt(2)
// (Demsar 2006, Table 5).
const NEMENYI_05: [f64; 9] = [1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164];
const NEMENYI_10: [f64; 9] = [1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920];

/// Fractional ranks, 1 = best. Exact ties share the mean of their positions.
pub fn compute_ranks(scores: &[f64], higher_is_better: bool) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let ord = scores[a].total_cmp(&scores[b]);
        if higher_is_better {
            ord.reverse()
        } else {
            ord
        }
    });
    let mut ranks = vec![0.0; scores.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end share their mean.
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    ranks
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FriedmanResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub critical_value: f64,
    pub reject: bool,
    pub average_ranks: Vec<f64>,
}

/// Friedman test in its chi-square form over an `N x m` rank matrix (rows are datasets).
pub fn friedman_test(ranks: &[Vec<f64>], alpha: f64) -> Result<FriedmanResult> {
    let alpha = Alpha::from_f64(alpha)?;
    let n = ranks.len();
    if n < 2 {
        return Err(Error::invalid(format!("Friedman test needs at least 2 datasets, got {n}")));
    }
    let m = ranks[0].len();
    if m < 2 {
        return Err(Error::invalid(format!("Friedman test needs at least 2 methods, got {m}")));
    }
    for row in ranks {
        Error::check_len(m, row.len())?;
    }
    let df = m - 1;
    let table = match alpha {
        Alpha::P05 => &CHI2_05,
        Alpha::P10 => &CHI2_10,
    };
    let critical = *table
        .get(df - 1)
        .ok_or_else(|| Error::Unsupported(format!("{m} methods; the embedded table covers up to 10")))?;
    let average: Vec<f64> = (0..m).map(|j| ranks.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let (nf, mf) = (n as f64, m as f64);
    let sum_sq: f64 = average.iter().map(|r| r * r).sum();
    let statistic = 12.0 * nf / (mf * (mf + 1.0)) * (sum_sq - mf * (mf + 1.0).powi(2) / 4.0);
    Ok(FriedmanResult {
        statistic,
        degrees_of_freedom: df,
        critical_value: critical,
        reject: statistic > critical,
        average_ranks: average,
    })
}

/// Nemenyi critical difference between average ranks of `m` methods over `n` datasets.
pub fn nemenyi_cd(m: usize, n: usize, alpha: f64) -> Result<f64> {
    let alpha = Alpha::from_f64(alpha)?;
    if !(2..=10).contains(&m) {
        return Err(Error::Unsupported(format!("{m} methods; the q table covers 2 to 10")));
    }
    if n == 0 {
        return Err(Error::Empty("dataset list"));
    }
    let q = match alpha {
        Alpha::P05 => NEMENYI_05[m - 2],
        Alpha::P10 => NEMENYI_10[m - 2],
    };
    let mf = m as f64;
    Ok(q * (mf * (mf + 1.0) / (6.0 * n as f64)).sqrt())
}
