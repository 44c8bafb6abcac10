//! Score as a function of ensemble size, on synthetic data by default.
//!
//! ```text
//! cargo run --release --example size_sweep -- data/emotions.arff
//! ```

use mlagg::dataio::load_dataset;
use mlagg::experiments::{size_sweep, toy_dataset, ExperimentSpec};
use mlagg::{EnsembleKind, LossKind, StrategyKind};

fn main() -> mlagg::Result<()> {
    let data = match std::env::args().nth(1) {
        Some(path) => load_dataset(path.as_ref(), None, None)?,
        None => toy_dataset(200, 0.8, 3)?.renamed("toy"),
    };
    let name = data.name().to_string();
    let spec = ExperimentSpec {
        ensembles: vec![EnsembleKind::Emodt],
        strategies: vec![StrategyKind::Gmv, StrategyKind::PtcMode],
        losses: vec![LossKind::SubsetZeroOne],
        folds: 5,
        ..ExperimentSpec::default()
    };
    let sizes = [1, 5, 10, 20];
    let sweep = size_sweep(&spec, &[data], &sizes)?;
    for s in &spec.strategies {
        let curve = sweep.curve(&name, EnsembleKind::Emodt, *s, LossKind::SubsetZeroOne);
        let points: Vec<String> = curve.iter().map(|(m, v)| format!("M={m}: {:.2}", v.unwrap_or(f64::NAN))).collect();
        println!("{:<9} {}", s.label(), points.join("  "));
    }
    Ok(())
}
