//! Train each ensemble type on synthetic data, save it, reload it and predict.

use mlagg::experiments::toy_dataset;
use mlagg::loss::hamming_loss;
use mlagg::{ensemble_predict, train_ensemble, EnsembleKind, EnsembleModel, LearnerConfig, LossKind, Strategy, StrategyKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let train = toy_dataset(300, 0.3, 11)?;
    let test = toy_dataset(200, 0.3, 12)?;
    let dir = std::env::temp_dir().join("mlagg-example");
    std::fs::create_dir_all(&dir)?;

    for kind in EnsembleKind::ALL {
        let model = train_ensemble(kind, &train, 10, &LearnerConfig::default(), 7)?;
        let path = dir.join(format!("{kind}.json"));
        model.save(&path)?;
        let model = EnsembleModel::load(&path)?;

        let strategy = Strategy::new(StrategyKind::PtcMode, LossKind::SubsetZeroOne);
        let mut total = 0.0;
        for i in 0..test.num_instances() {
            let x = test.features().row(i).to_vec();
            total += hamming_loss(&test.labels()[i], &ensemble_predict(&model, &x, strategy)?)?;
        }
        println!("{kind}: {} members, test Hamming {:.3}, saved to {}", model.len(), total / test.num_instances() as f64, path.display());
    }
    Ok(())
}
