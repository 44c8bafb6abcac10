//! Label-wise voting versus mode voting on the three-label toy distribution.
//!
//! ```text
//! cargo run --example toy_simulation -- 10000 20
//! ```

use mlagg::experiments::toy::{ground_truth, ExpectedLosses};
use mlagg::experiments::run_trials;
use mlagg::LabelVector;

fn main() -> mlagg::Result<()> {
    let mut args = std::env::args().skip(1);
    let m: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(10_000);
    let trials: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(20);

    for (code, p) in ground_truth().support() {
        let y = LabelVector::from_code(code, 3);
        let e = ExpectedLosses::of(&y);
        println!("P{y} = {p:.3}   E[hamming] = {:.4}   E[subset] = {:.4}", e.hamming, e.subset_zero_one);
    }

    let result = run_trials(m, trials, 1)?;
    println!();
    println!("{trials} trials with {m} sampled members each");
    println!("mode       = (0,0,0) in {} trials", result.mode_all_zero);
    println!("label-wise = (1,1,1) in {} trials", result.label_wise_all_one);
    Ok(())
}
