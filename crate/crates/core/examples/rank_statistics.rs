//! Friedman test and Nemenyi critical difference over a small score matrix.

use mlagg::experiments::{compute_ranks, friedman_test, nemenyi_cd};

fn main() -> mlagg::Result<()> {
    // Subset 0/1 loss (x100) of three methods on six datasets; lower is better.
    let scores = [
        [69.8, 67.8, 64.5],
        [79.3, 83.0, 78.8],
        [72.3, 74.9, 66.6],
        [52.1, 50.4, 49.9],
        [88.0, 88.0, 85.2],
        [61.0, 59.5, 60.1],
    ];
    let ranks: Vec<Vec<f64>> = scores.iter().map(|row| compute_ranks(row, false)).collect();
    for (row, r) in scores.iter().zip(&ranks) {
        println!("{row:?} -> ranks {r:?}");
    }
    let f = friedman_test(&ranks, 0.05)?;
    println!("average ranks {:?}", f.average_ranks);
    println!("chi2 = {:.3} (df {}, critical {:.3}), reject: {}", f.statistic, f.degrees_of_freedom, f.critical_value, f.reject);
    println!("Nemenyi CD at 0.05: {:.3}", nemenyi_cd(3, ranks.len(), 0.05)?);
    Ok(())
}
