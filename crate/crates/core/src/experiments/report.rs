//! Text renderings of result tables: long-format CSV, a markdown table
//! laid out like the published comparison, and a JSON summary.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::grid::{rank_alias, Cell, GroupComparison, ResultTable, SweepTable};
use crate::aggregate::StrategyKind;
use crate::error::{Error, Result};
use crate::learners::EnsembleKind;
use crate::loss::LossKind;

const NA: &str = "NA";

fn csv_error(e: csv::Error) -> Error {
    Error::InvalidInput(format!("writing CSV: {e}"))
}

/// One row per (cell, fold): `dataset,ensemble,strategy,loss,fold,score`.
/// Folds are numbered repeat-major from 0. A missing cell yields one row
/// with `NA` fold and score.
pub fn write_scores_csv<W: Write>(table: &ResultTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["dataset", "ensemble", "strategy", "loss", "fold", "score"]).map_err(csv_error)?;
    for c in &table.cells {
        let head = [c.dataset.as_str(), c.ensemble.name(), c.strategy.id(), c.loss.name()];
        if c.mean.is_none() {
            w.write_record(head.iter().copied().chain([NA, NA])).map_err(csv_error)?;
            continue;
        }
        for (f, s) in c.fold_scores.iter().enumerate() {
            let (fold, score) = (f.to_string(), s.to_string());
            w.write_record(head.iter().copied().chain([fold.as_str(), score.as_str()])).map_err(csv_error)?;
        }
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("writing CSV: {e}")))
}

/// Plot-ready sweep curves: `dataset,ensemble,strategy,loss,size,score`.
pub fn write_sweep_csv<W: Write>(sweep: &SweepTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["dataset", "ensemble", "strategy", "loss", "size", "score"]).map_err(csv_error)?;
    for p in &sweep.points {
        let score = p.mean.map_or_else(|| NA.to_string(), |m| m.to_string());
        w.write_record([
            p.dataset.as_str(),
            p.ensemble.name(),
            p.strategy.id(),
            p.loss.name(),
            &p.size.to_string(),
            &score,
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("writing CSV: {e}")))
}

/// Rebuilds a result table from [`write_scores_csv`] output. Protocol
/// metadata that the CSV does not carry (ensemble size, seed) is zero, and
/// `folds` is the largest per-cell fold count.
pub fn read_scores_csv<R: std::io::Read>(input: R, source_name: &str) -> Result<ResultTable> {
    let mut r = csv::Reader::from_reader(input);
    let located = |line: u64, message: String| Error::Parse {
        source_name: source_name.to_string(),
        line: line as usize,
        message,
    };
    let header = r.headers().map_err(|e| located(1, e.to_string()))?.clone();
    let expected = ["dataset", "ensemble", "strategy", "loss", "fold", "score"];
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(located(1, format!("header must be `{}`", expected.join(","))));
    }
    let mut table = ResultTable {
        datasets: Vec::new(),
        ensembles: Vec::new(),
        strategies: Vec::new(),
        losses: Vec::new(),
        m: 0,
        folds: 0,
        repeats: 1,
        seed: 0,
        cells: Vec::new(),
    };
    for record in r.records() {
        let rec = record.map_err(|e| located(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |e: Error| located(line, e.to_string());
        let dataset = rec[0].to_string();
        let ensemble: EnsembleKind = rec[1].parse().map_err(bad)?;
        let strategy: StrategyKind = rec[2].parse().map_err(bad)?;
        let loss: LossKind = rec[3].parse().map_err(bad)?;
        let score = match &rec[5] {
            NA => None,
            v => Some(
                v.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| located(line, format!("score `{v}` is not a number")))?,
            ),
        };
        push_unique(&mut table.datasets, dataset.clone());
        push_unique(&mut table.ensembles, ensemble);
        push_unique(&mut table.strategies, strategy);
        push_unique(&mut table.losses, loss);
        let pos = table
            .cells
            .iter()
            .position(|c| c.dataset == dataset && c.ensemble == ensemble && c.strategy == strategy && c.loss == loss);
        let cell = match pos {
            Some(i) => &mut table.cells[i],
            None => {
                table.cells.push(Cell {
                    dataset,
                    ensemble,
                    strategy,
                    loss,
                    fold_scores: Vec::new(),
                    mean: None,
                    error: None,
                });
                table.cells.last_mut().expect("just pushed")
            }
        };
        match score {
            Some(v) => cell.fold_scores.push(v),
            None => cell.error = Some("missing".into()),
        }
    }
    for c in &mut table.cells {
        if c.error.is_none() && !c.fold_scores.is_empty() {
            c.mean = Some(c.fold_scores.iter().sum::<f64>() / c.fold_scores.len() as f64);
        }
        table.folds = table.folds.max(c.fold_scores.len());
    }
    if table.cells.is_empty() {
        return Err(located(2, "no score rows".into()));
    }
    Ok(table)
}

fn push_unique<T: PartialEq>(v: &mut Vec<T>, x: T) {
    if !v.contains(&x) {
        v.push(x);
    }
}

fn loss_heading(loss: LossKind) -> &'static str {
    match loss {
        LossKind::Hamming => "Hamming loss (lower is better)",
        LossKind::SubsetZeroOne => "Subset 0/1 loss (lower is better)",
        LossKind::FMeasure => "F1 (higher is better)",
    }
}

/// Ranks print without a trailing `.0`.
pub fn format_rank(r: f64) -> String {
    if r.fract() == 0.0 {
        format!("{r:.0}")
    } else {
        let s = format!("{r:.2}");
        s.trim_end_matches('0').to_string()
    }
}

/// Markdown with one block per ensemble kind: a row per (loss, strategy),
/// a `score (rank)` column per dataset and the average rank. Strategies
/// identical to another one under the loss are printed as such.
pub fn render_markdown(table: &ResultTable) -> String {
    let mut s = String::new();
    for (i, &e) in table.ensembles.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        let _ = writeln!(s, "## {e}\n");
        let _ = write!(s, "| Loss | Method |");
        for d in &table.datasets {
            let _ = write!(s, " {d} |");
        }
        let _ = writeln!(s, " Avg. rank |");
        let _ = writeln!(s, "|---|---|{}---:|", "---:|".repeat(table.datasets.len()));
        for &loss in &table.losses {
            let cmp = table.compare(e, loss);
            let ranks: Vec<_> = table.datasets.iter().map(|d| table.ranks(d, e, loss)).collect();
            for &kind in &table.strategies {
                let _ = write!(s, "| {} | {} |", loss.name(), kind.label());
                let alias = rank_alias(kind, loss, &table.strategies);
                if alias != kind {
                    let _ = write!(s, " same as {} |", alias.label());
                    for _ in 1..=table.datasets.len() {
                        s.push_str(" |");
                    }
                    s.push('\n');
                    continue;
                }
                for (d, r) in table.datasets.iter().zip(&ranks) {
                    let text = match (table.score(d, e, kind, loss), r) {
                        (Some(v), Some(r)) => {
                            let rank = r.iter().find(|(k, _)| *k == kind).map_or(f64::NAN, |x| x.1);
                            format!("{v:.2} ({})", format_rank(rank))
                        }
                        (Some(v), None) => format!("{v:.2}"),
                        (None, _) => "-".to_string(),
                    };
                    let _ = write!(s, " {text} |");
                }
                let avg = cmp
                    .methods
                    .iter()
                    .position(|&m| m == kind)
                    .map(|i| cmp.average_ranks[i])
                    .filter(|r| r.is_finite())
                    .map_or_else(|| "-".to_string(), |r| format!("{r:.2}"));
                let _ = writeln!(s, " {avg} |");
            }
        }
        s.push('\n');
        for &loss in &table.losses {
            let _ = writeln!(s, "- {}: {}", loss_heading(loss), describe_tests(&table.compare(e, loss)));
        }
    }
    s
}

/// One-line description of how a table was produced.
pub fn protocol_line(table: &ResultTable) -> String {
    format!(
        "Scores in percent, mean over {} fold(s) x {} repeat(s), ensemble size {}, seed {}. Rank in parentheses.",
        table.folds, table.repeats, table.m, table.seed
    )
}

fn describe_tests(c: &GroupComparison) -> String {
    let n = c.datasets.len();
    let mut parts = vec![format!("N={n}, m={}", c.methods.len())];
    match (&c.friedman_05, &c.friedman_10) {
        (Some(a), Some(b)) => parts.push(format!(
            "Friedman chi2={:.3} ({} at 0.05, {} at 0.10)",
            a.statistic,
            if a.reject { "reject" } else { "retain" },
            if b.reject { "reject" } else { "retain" }
        )),
        _ => parts.push("Friedman test not applicable".to_string()),
    }
    if let (Some(a), Some(b)) = (c.cd_05, c.cd_10) {
        parts.push(format!("Nemenyi CD {a:.3} (0.05) / {b:.3} (0.10)"));
    }
    parts.join("; ")
}

#[derive(Serialize)]
struct CellSummary<'a> {
    dataset: &'a str,
    ensemble: EnsembleKind,
    strategy: StrategyKind,
    loss: LossKind,
    mean: Option<f64>,
    rank: Option<f64>,
    error: Option<&'a str>,
}

#[derive(Serialize)]
struct Summary<'a> {
    m: usize,
    folds: usize,
    repeats: usize,
    seed: u64,
    datasets: &'a [String],
    cells: Vec<CellSummary<'a>>,
    comparisons: Vec<GroupComparison>,
}

/// Means, ranks and test decisions as pretty-printed JSON.
pub fn summary_json(table: &ResultTable) -> Result<String> {
    let cells = table
        .cells
        .iter()
        .map(|c| CellSummary {
            dataset: &c.dataset,
            ensemble: c.ensemble,
            strategy: c.strategy,
            loss: c.loss,
            mean: c.mean,
            rank: table
                .ranks(&c.dataset, c.ensemble, c.loss)
                .and_then(|r| r.iter().find(|(k, _)| *k == c.strategy).map(|x| x.1)),
            error: c.error.as_deref(),
        })
        .collect();
    let summary = Summary {
        m: table.m,
        folds: table.folds,
        repeats: table.repeats,
        seed: table.seed,
        datasets: &table.datasets,
        cells,
        comparisons: table.comparisons(),
    };
    serde_json::to_string_pretty(&summary).map_err(|e| Error::InvalidInput(format!("serializing summary: {e}")))
}
