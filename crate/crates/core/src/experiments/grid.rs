use rayon::prelude::*;
use serde::Serialize;

use super::spec::ExperimentSpec;
use super::stats::{compute_ranks, friedman_test, nemenyi_cd, FriedmanResult};
use crate::aggregate::{Strategy, StrategyKind};
use crate::dataio::{preprocess, split_folds, Dataset, FoldPlan};
use crate::error::{Error, Result};
use crate::learners::{train_ensemble, EnsembleKind};
use crate::loss::LossKind;
use crate::seeding;

const TAG_PLAN: u64 = 0x91A;
const TAG_MODEL: u64 = 0x3E1;

/// One (dataset, ensemble, strategy, loss) entry of a result table. Scores
/// are percentages: losses for Hamming and subset 0/1, F1 for the F-measure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub dataset: String,
    pub ensemble: EnsembleKind,
    pub strategy: StrategyKind,
    pub loss: LossKind,
    /// One entry per (repeat, fold), repeat-major.
    pub fold_scores: Vec<f64>,
    /// Mean over folds; `None` when the cell could not be computed.
    pub mean: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultTable {
    pub datasets: Vec<String>,
    pub ensembles: Vec<EnsembleKind>,
    pub strategies: Vec<StrategyKind>,
    pub losses: Vec<LossKind>,
    pub m: usize,
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    pub cells: Vec<Cell>,
}

/// Score curve point of a size sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub dataset: String,
    pub ensemble: EnsembleKind,
    pub strategy: StrategyKind,
    pub loss: LossKind,
    pub size: usize,
    pub mean: Option<f64>,
    pub fold_scores: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub sizes: Vec<usize>,
    pub points: Vec<SweepPoint>,
}

impl SweepTable {
    pub fn curve(&self, dataset: &str, ensemble: EnsembleKind, strategy: StrategyKind, loss: LossKind) -> Vec<(usize, Option<f64>)> {
        self.points
            .iter()
            .filter(|p| p.dataset == dataset && p.ensemble == ensemble && p.strategy == strategy && p.loss == loss)
            .map(|p| (p.size, p.mean))
            .collect()
    }
}

/// For Hamming and subset 0/1 the combine-then-predict and label-wise
/// predict-then-combine pipelines coincide with GMV and BMV; the rank
/// tables treat them as the same method.
pub fn rank_alias(kind: StrategyKind, loss: LossKind, present: &[StrategyKind]) -> StrategyKind {
    if loss == LossKind::FMeasure {
        return kind;
    }
    let alias = match kind {
        StrategyKind::Ctp => StrategyKind::Gmv,
        StrategyKind::PtcLabelWise => StrategyKind::Bmv,
        other => other,
    };
    if present.contains(&alias) {
        alias
    } else {
        kind
    }
}

/// Methods compared for `loss`, after aliasing, in spec order.
pub fn ranked_methods(strategies: &[StrategyKind], loss: LossKind) -> Vec<StrategyKind> {
    let mut out = Vec::new();
    for &s in strategies {
        let a = rank_alias(s, loss, strategies);
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupComparison {
    pub ensemble: EnsembleKind,
    pub loss: LossKind,
    pub methods: Vec<StrategyKind>,
    /// Datasets with every method present.
    pub datasets: Vec<String>,
    pub average_ranks: Vec<f64>,
    pub friedman_05: Option<FriedmanResult>,
    pub friedman_10: Option<FriedmanResult>,
    pub cd_05: Option<f64>,
    pub cd_10: Option<f64>,
}

impl ResultTable {
    pub fn cell(&self, dataset: &str, ensemble: EnsembleKind, strategy: StrategyKind, loss: LossKind) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.dataset == dataset && c.ensemble == ensemble && c.strategy == strategy && c.loss == loss)
    }

    pub fn score(&self, dataset: &str, ensemble: EnsembleKind, strategy: StrategyKind, loss: LossKind) -> Option<f64> {
        self.cell(dataset, ensemble, strategy, loss).and_then(|c| c.mean)
    }

    /// Ranks of every strategy within one (dataset, ensemble, loss) group;
    /// aliased strategies share the rank of their equivalent. `None` if a
    /// compared cell is missing.
    pub fn ranks(&self, dataset: &str, ensemble: EnsembleKind, loss: LossKind) -> Option<Vec<(StrategyKind, f64)>> {
        let methods = ranked_methods(&self.strategies, loss);
        let scores = methods
            .iter()
            .map(|&s| self.score(dataset, ensemble, s, loss))
            .collect::<Option<Vec<f64>>>()?;
        let ranks = compute_ranks(&scores, loss.is_utility());
        Some(
            self.strategies
                .iter()
                .map(|&s| {
                    let a = rank_alias(s, loss, &self.strategies);
                    let i = methods.iter().position(|&m| m == a).expect("alias is a compared method");
                    (s, ranks[i])
                })
                .collect(),
        )
    }

    /// Average ranks and significance tests across datasets for one ensemble and loss.
    pub fn compare(&self, ensemble: EnsembleKind, loss: LossKind) -> GroupComparison {
        let methods = ranked_methods(&self.strategies, loss);
        let mut datasets = Vec::new();
        let mut matrix = Vec::new();
        for d in &self.datasets {
            let Some(scores) = methods
                .iter()
                .map(|&s| self.score(d, ensemble, s, loss))
                .collect::<Option<Vec<f64>>>()
            else {
                continue;
            };
            datasets.push(d.clone());
            matrix.push(compute_ranks(&scores, loss.is_utility()));
        }
        let n = matrix.len();
        let m = methods.len();
        let average_ranks = (0..m)
            .map(|j| if n == 0 { f64::NAN } else { matrix.iter().map(|r| r[j]).sum::<f64>() / n as f64 })
            .collect();
        GroupComparison {
            ensemble,
            loss,
            average_ranks,
            friedman_05: friedman_test(&matrix, 0.05).ok(),
            friedman_10: friedman_test(&matrix, 0.10).ok(),
            cd_05: nemenyi_cd(m, n, 0.05).ok(),
            cd_10: nemenyi_cd(m, n, 0.10).ok(),
            methods,
            datasets,
        }
    }

    pub fn comparisons(&self) -> Vec<GroupComparison> {
        self.ensembles
            .iter()
            .flat_map(|&e| self.losses.iter().map(move |&l| (e, l)))
            .map(|(e, l)| self.compare(e, l))
            .collect()
    }
}

/// Per-fold scores indexed `[size][strategy][loss]`.
type FoldScores = Vec<Vec<Vec<f64>>>;

struct Job {
    dataset: usize,
    kind: EnsembleKind,
    repeat: usize,
    fold: usize,
}

fn score_percent(loss: LossKind, y: &crate::labels::LabelVector, yhat: &crate::labels::LabelVector) -> f64 {
    100.0 * loss.evaluate(y, yhat).expect("prediction has the dataset's label count")
}

/// Trains the largest ensemble on one training fold and scores every
/// (prefix size, strategy, loss) on the held-out fold.
fn run_job(spec: &ExperimentSpec, data: &Dataset, plan: &FoldPlan, job: &Job, sizes: &[usize]) -> Result<FoldScores> {
    let train_rows = plan.train_indices(job.fold);
    let test_rows = plan.test_indices(job.fold);
    let (train, transformer) = preprocess(data, &train_rows)?;
    let max_size = *sizes.iter().max().expect("nonempty sizes");
    let seed = seeding::derive_seed(
        spec.seed,
        &[TAG_MODEL, job.dataset as u64, job.repeat as u64, job.fold as u64, job.kind as u64],
    );
    let model = train_ensemble(job.kind, &train, max_size, &spec.learner, seed)?;
    let mut sums = vec![vec![vec![0.0; spec.losses.len()]; spec.strategies.len()]; sizes.len()];
    for &i in &test_rows {
        let x = transformer.apply_row(&data.features().row(i).to_vec())?;
        let relevance = model.member_relevance(&x)?;
        let y = &data.labels()[i];
        for (si, &size) in sizes.iter().enumerate() {
            let members = &relevance[..size];
            for (ki, &kind) in spec.strategies.iter().enumerate() {
                for (li, &loss) in spec.losses.iter().enumerate() {
                    let yhat = Strategy::new(kind, loss).apply(members)?;
                    sums[si][ki][li] += score_percent(loss, y, &yhat);
                }
            }
        }
    }
    let n = test_rows.len() as f64;
    sums.iter_mut().flatten().flatten().for_each(|s| *s /= n);
    Ok(sums)
}

/// The fold assignments, one plan per repeat, used for the `dataset_index`-th dataset.
pub fn fold_plans(spec: &ExperimentSpec, dataset_index: usize, num_instances: usize) -> Result<Vec<FoldPlan>> {
    split_folds(
        num_instances,
        spec.folds,
        seeding::derive_seed(spec.seed, &[TAG_PLAN, dataset_index as u64]),
        spec.repeats,
    )
}

struct Evaluation {
    dataset: usize,
    kind: EnsembleKind,
    /// `[fold][size][strategy][loss]`, or the first error.
    folds: std::result::Result<Vec<FoldScores>, String>,
}

fn evaluate(spec: &ExperimentSpec, datasets: &[Dataset], sizes: &[usize]) -> Result<Vec<Evaluation>> {
    spec.validate()?;
    if datasets.is_empty() {
        return Err(Error::Config("datasets: no dataset given".into()));
    }
    let plans = datasets
        .iter()
        .enumerate()
        .map(|(d, data)| fold_plans(spec, d, data.num_instances()))
        .collect::<Result<Vec<_>>>()?;

    let mut jobs = Vec::new();
    for d in 0..datasets.len() {
        for &kind in &spec.ensembles {
            for repeat in 0..spec.repeats {
                for fold in 0..spec.folds {
                    jobs.push(Job { dataset: d, kind, repeat, fold });
                }
            }
        }
    }
    let results: Vec<Result<FoldScores>> = jobs
        .par_iter()
        .map(|job| run_job(spec, &datasets[job.dataset], &plans[job.dataset][job.repeat], job, sizes))
        .collect();

    let mut out = Vec::new();
    let per_group = spec.repeats * spec.folds;
    for (chunk_jobs, chunk) in jobs.chunks(per_group).zip(results.chunks(per_group)) {
        let folds = chunk
            .iter()
            .map(|r| r.as_ref().cloned().map_err(ToString::to_string))
            .collect::<std::result::Result<Vec<_>, _>>();
        out.push(Evaluation {
            dataset: chunk_jobs[0].dataset,
            kind: chunk_jobs[0].kind,
            folds,
        });
    }
    Ok(out)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Cross-validated scores of every (dataset, ensemble, strategy, loss).
/// A cell whose training or prediction fails is kept with its error instead
/// of aborting the grid.
pub fn run_grid(spec: &ExperimentSpec, datasets: &[Dataset]) -> Result<ResultTable> {
    let evaluations = evaluate(spec, datasets, &[spec.m])?;
    let mut cells = Vec::new();
    for ev in &evaluations {
        for (ki, &strategy) in spec.strategies.iter().enumerate() {
            for (li, &loss) in spec.losses.iter().enumerate() {
                let (fold_scores, error) = match &ev.folds {
                    Ok(folds) => (folds.iter().map(|f| f[0][ki][li]).collect::<Vec<_>>(), None),
                    Err(e) => (Vec::new(), Some(e.clone())),
                };
                cells.push(Cell {
                    dataset: datasets[ev.dataset].name().to_string(),
                    ensemble: ev.kind,
                    strategy,
                    loss,
                    mean: error.is_none().then(|| mean(&fold_scores)),
                    fold_scores,
                    error,
                });
            }
        }
    }
    Ok(ResultTable {
        datasets: datasets.iter().map(|d| d.name().to_string()).collect(),
        ensembles: spec.ensembles.clone(),
        strategies: spec.strategies.clone(),
        losses: spec.losses.clone(),
        m: spec.m,
        folds: spec.folds,
        repeats: spec.repeats,
        seed: spec.seed,
        cells,
    })
}

/// Scores of nested ensembles: per fold the largest ensemble is trained
/// once and each size evaluates its first members. `spec.m` is ignored.
pub fn size_sweep(spec: &ExperimentSpec, datasets: &[Dataset], sizes: &[usize]) -> Result<SweepTable> {
    if sizes.is_empty() {
        return Err(Error::Config("sizes: list must not be empty".into()));
    }
    if sizes.contains(&0) {
        return Err(Error::Config("sizes: ensemble sizes must be >= 1".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("sizes: must be strictly ascending".into()));
    }
    let evaluations = evaluate(spec, datasets, sizes)?;
    let mut points = Vec::new();
    for ev in &evaluations {
        for (ki, &strategy) in spec.strategies.iter().enumerate() {
            for (li, &loss) in spec.losses.iter().enumerate() {
                for (si, &size) in sizes.iter().enumerate() {
                    let (fold_scores, error) = match &ev.folds {
                        Ok(folds) => (folds.iter().map(|f| f[si][ki][li]).collect::<Vec<_>>(), None),
                        Err(e) => (Vec::new(), Some(e.clone())),
                    };
                    points.push(SweepPoint {
                        dataset: datasets[ev.dataset].name().to_string(),
                        ensemble: ev.kind,
                        strategy,
                        loss,
                        size,
                        mean: error.is_none().then(|| mean(&fold_scores)),
                        fold_scores,
                        error,
                    });
                }
            }
        }
    }
    Ok(SweepTable {
        sizes: sizes.to_vec(),
        points,
    })
}
