//! Every aggregation strategy applied to a handful of member outputs.

use mlagg::{LossKind, MarginalVector, Strategy, StrategyKind};

fn main() -> mlagg::Result<()> {
    let members = [
        vec![0.9, 0.6, 0.2, 0.45],
        vec![0.8, 0.4, 0.1, 0.45],
        vec![0.3, 0.7, 0.6, 0.40],
        vec![0.7, 0.2, 0.3, 0.45],
        vec![0.6, 0.6, 0.7, 0.35],
    ]
    .into_iter()
    .map(MarginalVector::new)
    .collect::<mlagg::Result<Vec<_>>>()?;

    print!("{:<10}", "");
    for loss in LossKind::ALL {
        print!("{:>18}", loss.to_string());
    }
    println!();
    for kind in StrategyKind::ALL {
        print!("{:<10}", kind.label());
        for loss in LossKind::ALL {
            let yhat = Strategy::new(kind, loss).apply(&members)?;
            print!("{:>18}", yhat.to_string());
        }
        println!();
    }
    Ok(())
}
