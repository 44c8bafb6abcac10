//! Cross-validated comparisons, rank statistics, size sweeps and the toy simulation.

pub mod grid;
pub mod report;
pub mod spec;
pub mod stats;
pub mod toy;

pub use grid::{
    fold_plans, rank_alias, ranked_methods, run_grid, size_sweep, Cell, GroupComparison, ResultTable, SweepPoint, SweepTable,
};
pub use report::{protocol_line, read_scores_csv, render_markdown, summary_json, write_scores_csv, write_sweep_csv};
pub use spec::{DatasetRef, ExperimentConfig, ExperimentSpec};
pub use stats::{compute_ranks, friedman_test, nemenyi_cd, Alpha, FriedmanResult};
pub use toy::{run_trials, simulate_toy, toy_dataset, ExpectedLosses, ToyOutcome, ToyTrials};
