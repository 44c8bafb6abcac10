//! The three Bayes-optimal rules on a small correlated joint distribution.

use mlagg::loss::{expected_loss, marginalize};
use mlagg::riskmin::{bayes_optimal_bruteforce, predict_f_independent, predict_hamming, predict_subset_mode};
use mlagg::{JointDistribution, LabelVector, LossKind};

fn main() -> mlagg::Result<()> {
    // The empty set is the single most likely outcome, yet each label is relevant more often than not.
    let joint = JointDistribution::new(3, vec![0.28, 0.0, 0.0, 0.18, 0.0, 0.18, 0.18, 0.18])?;
    let p = marginalize(&joint);
    println!("marginals {:?}", p.as_slice());

    let rules = [
        ("threshold", predict_hamming(&p, 0.5)),
        ("mode", predict_subset_mode(&joint)),
        ("F rule", predict_f_independent(&p)),
    ];
    for (name, yhat) in &rules {
        print!("{name:>10} {yhat}");
        for loss in LossKind::ALL {
            print!("  {loss} {:.4}", expected_loss(&joint, yhat, loss)?);
        }
        println!();
    }

    // The F rule assumes independence; exhaustive search does not.
    let exact: LabelVector = bayes_optimal_bruteforce(&joint, LossKind::FMeasure)?;
    println!("exhaustive F optimum {exact}  E[F] = {:.4}", expected_loss(&joint, &exact, LossKind::FMeasure)?);
    Ok(())
}
