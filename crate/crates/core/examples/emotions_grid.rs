//! Cross-validated EMODT comparison on the emotions dataset.
//!
//! ```text
//! cargo run --release --example emotions_grid -- data/emotions.arff
//! ```

use std::path::PathBuf;

use mlagg::dataio::load_dataset;
use mlagg::experiments::{render_markdown, run_grid, ExperimentSpec};
use mlagg::EnsembleKind;

fn main() -> mlagg::Result<()> {
    let path = std::env::args().nth(1).map_or_else(|| PathBuf::from("data/emotions.arff"), PathBuf::from);
    let data = load_dataset(&path, None, None)?;
    let spec = ExperimentSpec {
        ensembles: vec![EnsembleKind::Emodt],
        ..ExperimentSpec::default()
    };
    let start = std::time::Instant::now();
    let table = run_grid(&spec, &[data])?;
    print!("{}", render_markdown(&table));
    eprintln!("took {:.1?}", start.elapsed());
    Ok(())
}
