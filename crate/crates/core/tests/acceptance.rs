//! Acceptance checks, one line per criterion.
//!
//! A criterion whose input data is not available (for example `flags.arff`)
//! is reported as `FAIL (blocked: ...)`. Blocked criteria do not change the
//! exit status unless `MLAGG_ACCEPTANCE_STRICT` is set; any other failure does.
//! Datasets are read from `$MLAGG_DATA_DIR`, defaulting to the repository's `data/`.

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use mlagg::aggregate::gmv;
use mlagg::dataio::{load_arff, load_dataset, ArffDocument, LabelSpec};
use mlagg::experiments::toy::ExpectedLosses;
use mlagg::experiments::{friedman_test, nemenyi_cd, run_grid, size_sweep, ExperimentSpec, ResultTable};
use mlagg::loss::marginalize;
use mlagg::riskmin::{expected_f_independent, predict_f_independent, predict_hamming, predict_subset_mode};
use mlagg::{EnsembleKind, LabelVector, LossKind, Strategy, StrategyKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Blocked(String),
}

use Outcome::{Blocked, Fail, Pass};

fn data_dir() -> PathBuf {
    std::env::var_os("MLAGG_DATA_DIR")
        .map_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"), PathBuf::from)
}

/// Collects failed checks; the criterion passes when the list stays empty.
#[derive(Default)]
struct Checks(Vec<String>);

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.0.push(what.into());
        }
    }

    fn finish(self, detail: String) -> Outcome {
        if self.0.is_empty() {
            Pass(detail)
        } else {
            Fail(format!("{}; {detail}", self.0.join("; ")))
        }
    }
}

fn c1_toy() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_mlagg"))
        .args(["toy", "--m", "10000", "--trials", "100"])
        .output()
        .expect("binary runs");
    let text = String::from_utf8_lossy(&out.stdout);
    let count = |prefix: &str| -> Option<usize> {
        let line = text.lines().find(|l| l.starts_with(prefix))?;
        line.split(" in ").nth(1)?.split('/').next()?.parse().ok()
    };
    let mut c = Checks::default();
    c.check(out.status.success(), "toy command failed");
    let mode = count("PTC-mode = (0,0,0)");
    let lw = count("PTC-lw   = (1,1,1)");
    c.check(mode.is_some_and(|n| n >= 99), format!("mode (0,0,0) in {mode:?}/100"));
    c.check(lw.is_some_and(|n| n >= 99), format!("label-wise (1,1,1) in {lw:?}/100"));
    let zero = ExpectedLosses::of(&LabelVector::zeros(3));
    let ones = ExpectedLosses::of(&LabelVector::from_code(0b111, 3));
    c.check(zero.subset_zero_one == 3.0 / 4.0, format!("subset (0,0,0) = {}", zero.subset_zero_one));
    c.check(ones.subset_zero_one == 13.0 / 16.0, format!("subset (1,1,1) = {}", ones.subset_zero_one));
    c.check(ones.hamming == 7.0 / 16.0, format!("hamming (1,1,1) = {}", ones.hamming));
    c.check(zero.hamming == 9.0 / 16.0, format!("hamming (0,0,0) = {}", zero.hamming));
    c.finish(format!("mode {}/100, label-wise {}/100, losses 3/4 13/16 7/16 9/16", mode.unwrap_or(0), lw.unwrap_or(0)))
}

fn c2_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut c = Checks::default();
    let mut worst_h = 0.0f64;
    for t in 0..200 {
        let k = rng.random_range(1..=10);
        let joint = common::random_joint(k, &mut rng);
        let mass = joint.mass();
        let h = predict_hamming(&marginalize(&joint), 0.5).code().unwrap();
        let gap = (common::expected(mass, k, h, LossKind::Hamming) - common::optimum(mass, k, LossKind::Hamming)).abs();
        worst_h = worst_h.max(gap);
        c.check(gap <= 1e-12, format!("joint {t} (K={k}): Hamming gap {gap:e}"));
        let mode = predict_subset_mode(&joint).code().unwrap();
        let best = common::optimum(mass, k, LossKind::SubsetZeroOne);
        c.check(
            common::expected(mass, k, mode, LossKind::SubsetZeroOne) == best,
            format!("joint {t} (K={k}): mode is not optimal"),
        );
    }
    let (mut worst_f, mut worst_dp) = (0.0f64, 0.0f64);
    for t in 0..200 {
        let k = rng.random_range(1..=12);
        let p = common::random_marginals(k, &mut rng);
        let mass = common::independent_mass(p.as_slice());
        let yhat = predict_f_independent(&p);
        let got = common::expected(&mass, k, yhat.code().unwrap(), LossKind::FMeasure);
        let gap = common::optimum(&mass, k, LossKind::FMeasure) - got;
        worst_f = worst_f.max(gap);
        c.check(gap <= 1e-9, format!("marginals {t} (K={k}): F gap {gap:e}"));
        // The DP against enumeration, for the chosen set and a random one.
        let other = LabelVector::from_code(rng.random_range(0..1u64 << k), k);
        for y in [&yhat, &other] {
            let dp = expected_f_independent(&p, y).unwrap();
            let direct = common::expected(&mass, k, y.code().unwrap(), LossKind::FMeasure);
            worst_dp = worst_dp.max((dp - direct).abs());
            c.check((dp - direct).abs() <= 1e-12, format!("marginals {t} (K={k}): DP off by {:e}", dp - direct));
        }
    }
    c.finish(format!(
        "400 cases; worst Hamming gap {worst_h:.1e}, F gap {worst_f:.1e}, DP error {worst_dp:.1e}"
    ))
}

fn c3_equivalences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31337);
    let mut counterexamples = 0;
    let sets = 10_000;
    for _ in 0..sets {
        let m = rng.random_range(1..=25);
        let k = rng.random_range(1..=10);
        let members = common::random_members(m, k, &mut rng);
        for loss in [LossKind::Hamming, LossKind::SubsetZeroOne] {
            let run = |kind| Strategy::new(kind, loss).apply(&members).unwrap();
            if run(StrategyKind::Ctp) != run(StrategyKind::Gmv) {
                counterexamples += 1;
            }
            if run(StrategyKind::PtcLabelWise) != run(StrategyKind::Bmv) {
                counterexamples += 1;
            }
        }
        if gmv(&members).unwrap().to_bits() != common::mean_threshold(&members) {
            counterexamples += 1;
        }
    }
    if counterexamples == 0 {
        Pass(format!("{sets} member sets, 0 counterexamples"))
    } else {
        Fail(format!("{counterexamples} counterexamples over {sets} member sets"))
    }
}

fn score(table: &ResultTable, dataset: &str, e: EnsembleKind, s: StrategyKind, l: LossKind) -> f64 {
    table.score(dataset, e, s, l).unwrap_or(f64::NAN)
}

/// Compares every (strategy, loss) mean against the published value.
fn envelope(c: &mut Checks, table: &ResultTable, dataset: &str, e: EnsembleKind, published: &[(StrategyKind, LossKind, f64)]) -> f64 {
    let mut worst = 0.0f64;
    for &(s, l, v) in published {
        let got = score(table, dataset, e, s, l);
        let diff = (got - v).abs();
        worst = worst.max(if diff.is_nan() { f64::INFINITY } else { diff });
        c.check(diff <= 5.0, format!("{} {l} {got:.2} vs published {v:.2}", s.label()));
    }
    worst
}

fn with_aliases(rows: &[(StrategyKind, LossKind, f64)]) -> Vec<(StrategyKind, LossKind, f64)> {
    let mut out = rows.to_vec();
    for &(s, l, v) in rows {
        if l != LossKind::FMeasure {
            match s {
                StrategyKind::Gmv => out.push((StrategyKind::Ctp, l, v)),
                StrategyKind::Bmv => out.push((StrategyKind::PtcLabelWise, l, v)),
                _ => {}
            }
        }
    }
    out
}

fn c4_emotions() -> Outcome {
    use LossKind::{FMeasure as F, Hamming as H, SubsetZeroOne as S};
    use StrategyKind::*;
    let path = data_dir().join("emotions.arff");
    if !path.exists() {
        return Blocked(format!("{} not found", path.display()));
    }
    let data = match load_dataset(&path, None, None) {
        Ok(d) => d,
        Err(e) => return Fail(e.to_string()),
    };
    let spec = ExperimentSpec {
        ensembles: vec![EnsembleKind::Emodt],
        m: 50,
        folds: 10,
        seed: 1,
        ..ExperimentSpec::default()
    };
    let table = match run_grid(&spec, &[data]) {
        Ok(t) => t,
        Err(e) => return Fail(e.to_string()),
    };
    let e = EnsembleKind::Emodt;
    let get = |s, l| score(&table, "emotions", e, s, l);
    let mut c = Checks::default();
    c.check(get(PtcMode, S) < get(Bmv, S) && get(PtcMode, S) < get(Gmv, S), format!(
        "subset: PTC-mode {:.2} not below BMV {:.2} and GMV {:.2}",
        get(PtcMode, S),
        get(Bmv, S),
        get(Gmv, S)
    ));
    c.check(get(Ctp, F) - get(Gmv, F) >= 5.0, format!("F1: CTP {:.2} - GMV {:.2} < 5", get(Ctp, F), get(Gmv, F)));
    let hamming: Vec<f64> = StrategyKind::ALL.iter().map(|&s| get(s, H)).collect();
    let spread = hamming.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - hamming.iter().cloned().fold(f64::INFINITY, f64::min);
    c.check(spread <= 2.0, format!("Hamming spread {spread:.2} > 2"));
    let published = with_aliases(&[
        (Gmv, H, 18.72),
        (Bmv, H, 18.52),
        (PtcMode, H, 19.66),
        (Gmv, S, 69.82),
        (Bmv, S, 67.81),
        (PtcMode, S, 64.45),
        (Gmv, F, 58.18),
        (Bmv, F, 61.79),
        (Ctp, F, 68.30),
        (PtcLabelWise, F, 68.29),
        (PtcMode, F, 68.25),
    ]);
    let worst = envelope(&mut c, &table, "emotions", e, &published);
    c.finish(format!(
        "subset GMV/BMV/PTC-mode {:.2}/{:.2}/{:.2}, F1 CTP-GMV {:+.2}, Hamming spread {spread:.2}, max deviation {worst:.2}",
        get(Gmv, S),
        get(Bmv, S),
        get(PtcMode, S),
        get(Ctp, F) - get(Gmv, F)
    ))
}

fn c5_flags() -> Outcome {
    use LossKind::{FMeasure as F, Hamming as H, SubsetZeroOne as S};
    use StrategyKind::*;
    let path = data_dir().join("flags.arff");
    if !path.exists() {
        return Blocked(format!("{} not found", path.display()));
    }
    let data = match load_dataset(&path, None, None) {
        Ok(d) => d,
        Err(e) => return Fail(e.to_string()),
    };
    let name = data.name().to_string();
    let spec = ExperimentSpec {
        ensembles: vec![EnsembleKind::Ecc],
        m: 50,
        folds: 10,
        seed: 1,
        ..ExperimentSpec::default()
    };
    let table = match run_grid(&spec, &[data]) {
        Ok(t) => t,
        Err(e) => return Fail(e.to_string()),
    };
    let e = EnsembleKind::Ecc;
    let mut c = Checks::default();
    let mode = score(&table, &name, e, PtcMode, S);
    for s in StrategyKind::ALL {
        let v = score(&table, &name, e, s, S);
        c.check(mode <= v, format!("subset: PTC-mode {mode:.2} above {} {v:.2}", s.label()));
    }
    let published = with_aliases(&[
        (Gmv, H, 23.26),
        (Bmv, H, 23.48),
        (PtcMode, H, 22.52),
        (Gmv, S, 72.32),
        (Bmv, S, 74.87),
        (PtcMode, S, 66.61),
        (Gmv, F, 72.80),
        (Bmv, F, 72.56),
        (Ctp, F, 74.21),
        (PtcLabelWise, F, 74.53),
        (PtcMode, F, 74.13),
    ]);
    let worst = envelope(&mut c, &table, &name, e, &published);
    c.finish(format!("subset PTC-mode {mode:.2}, max deviation {worst:.2}"))
}

fn c6_sweep() -> Outcome {
    let path = data_dir().join("emotions.arff");
    if !path.exists() {
        return Blocked(format!("{} not found", path.display()));
    }
    let data = match load_dataset(&path, None, None) {
        Ok(d) => d,
        Err(e) => return Fail(e.to_string()),
    };
    let spec = ExperimentSpec {
        ensembles: vec![EnsembleKind::Emodt],
        strategies: vec![StrategyKind::PtcMode],
        losses: vec![LossKind::SubsetZeroOne],
        folds: 10,
        seed: 1,
        ..ExperimentSpec::default()
    };
    let sweep = match size_sweep(&spec, &[data], &[1, 5, 10, 20, 50]) {
        Ok(s) => s,
        Err(e) => return Fail(e.to_string()),
    };
    let curve: Vec<f64> = sweep
        .curve("emotions", EnsembleKind::Emodt, StrategyKind::PtcMode, LossKind::SubsetZeroOne)
        .iter()
        .map(|(_, v)| v.unwrap_or(f64::NAN))
        .collect();
    let mut c = Checks::default();
    c.check(curve[0] - curve[4] >= 5.0, format!("drop M=1 -> M=50 is {:.2}", curve[0] - curve[4]));
    c.check(curve[4] <= curve[1], format!("M=50 {:.2} above M=5 {:.2}", curve[4], curve[1]));
    let text: Vec<String> = curve.iter().map(|v| format!("{v:.2}")).collect();
    c.finish(format!("PTC-mode subset 0/1 at M=1,5,10,20,50: {}", text.join(", ")))
}

fn c7_statistics() -> Outcome {
    let mut c = Checks::default();
    let cd05 = nemenyi_cd(5, 7, 0.05).unwrap();
    let cd10 = nemenyi_cd(5, 7, 0.10).unwrap();
    c.check((cd05 - 2.305).abs() <= 0.005, format!("CD(5,7,0.05) = {cd05:.4}"));
    c.check((cd10 - 2.078).abs() <= 0.005, format!("CD(5,7,0.10) = {cd10:.4}"));
    let ranks = vec![vec![1.0, 2.0]; 8];
    let f = friedman_test(&ranks, 0.05).unwrap();
    c.check(f.statistic == 8.0, format!("Friedman statistic {}", f.statistic));
    c.check(f.reject, "Friedman does not reject at 0.05");
    c.finish(format!(
        "CD {cd05:.3}/{cd10:.3}, Friedman chi2 {} (critical {}, reject {})",
        f.statistic, f.critical_value, f.reject
    ))
}

fn c8_parser() -> Outcome {
    let mut c = Checks::default();
    let mut notes = Vec::new();

    let emotions = data_dir().join("emotions.arff");
    match load_dataset(&emotions, None, None) {
        Ok(d) => {
            c.check(
                (d.num_instances(), d.num_features(), d.num_labels()) == (593, 72, 6),
                format!("emotions is {}x{} with {} labels", d.num_instances(), d.num_features(), d.num_labels()),
            );
            notes.push(format!("emotions N={} d={} K={}", d.num_instances(), d.num_features(), d.num_labels()));
        }
        Err(e) => c.check(false, format!("emotions: {e}")),
    }

    let corpus = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/malformed");
    let mut fixtures: Vec<PathBuf> = std::fs::read_dir(&corpus)
        .map(|rd| rd.filter_map(|e| e.ok().map(|e| e.path())).collect())
        .unwrap_or_default();
    fixtures.sort();
    let mut located = 0;
    for path in &fixtures {
        let prefix = format!("{}:", path.display());
        match load_arff(path, &LabelSpec::Last(1)) {
            Err(e @ mlagg::Error::Parse { .. }) if e.to_string().starts_with(&prefix) => located += 1,
            Err(e) => c.check(false, format!("{}: not located: {e}", path.display())),
            Ok(_) => c.check(false, format!("{} was accepted", path.display())),
        }
    }
    c.check(fixtures.len() >= 10, format!("only {} malformed fixtures", fixtures.len()));
    notes.push(format!("{located}/{} malformed fixtures rejected with line numbers", fixtures.len()));

    let flags = data_dir().join("flags.arff");
    if !flags.exists() {
        let detail = format!("{}; {} not found", notes.join(", "), flags.display());
        return if c.0.is_empty() {
            Blocked(detail)
        } else {
            Fail(format!("{}; {detail}", c.0.join("; ")))
        };
    }
    match (load_dataset(&flags, None, None), std::fs::read_to_string(&flags)) {
        (Ok(d), Ok(text)) => {
            c.check((d.num_instances(), d.num_labels()) == (194, 7), format!("flags N={} K={}", d.num_instances(), d.num_labels()));
            match ArffDocument::parse(&text, "flags").and_then(|doc| {
                let labels = doc.label_indices(&LabelSpec::Names(d.label_names().to_vec()))?;
                Ok(doc.kind_counts((0..doc.attributes.len()).filter(|i| !labels.contains(i))))
            }) {
                Ok((numeric, nominal)) => {
                    c.check((numeric, nominal) == (10, 9), format!("flags has {numeric} numeric and {nominal} nominal attributes"));
                    notes.push(format!("flags N={} raw attributes {numeric}+{nominal} K={}", d.num_instances(), d.num_labels()));
                }
                Err(e) => c.check(false, format!("flags: {e}")),
            }
        }
        (Err(e), _) => c.check(false, format!("flags: {e}")),
        (_, Err(e)) => c.check(false, format!("flags: {e}")),
    }
    c.finish(notes.join(", "))
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    // Runtime budgets as stated per criterion.
    let criteria: [Criterion; 8] = [
        (1, "toy problem: mode avoids (1,1,1)", Duration::from_secs(5), c1_toy),
        (2, "risk minimizers match exhaustive oracles", Duration::from_secs(60), c2_oracles),
        (3, "CTP = GMV and PTC-lw = BMV under Hamming and subset 0/1", Duration::from_secs(60), c3_equivalences),
        (4, "emotions EMODT M=50 directional replication", Duration::from_secs(300), c4_emotions),
        (5, "flags ECC M=50 directional replication", Duration::from_secs(120), c5_flags),
        (6, "emotions EMODT size sweep trend", Duration::from_secs(600), c6_sweep),
        (7, "Nemenyi CD and Friedman statistic", Duration::from_secs(1), c7_statistics),
        (8, "ARFF parser shapes and malformed corpus", Duration::from_secs(30), c8_parser),
    ];
    let strict = std::env::var_os("MLAGG_ACCEPTANCE_STRICT").is_some();
    let (mut passed, mut failed, mut blocked) = (0, 0, 0);
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > budget;
        let timing = format!("{:.2}s of {}s", elapsed.as_secs_f64(), budget.as_secs());
        match outcome {
            Pass(detail) if !over => {
                passed += 1;
                println!("PASS  [{id}] {name}: {detail} ({timing})");
            }
            Pass(detail) => {
                failed += 1;
                println!("FAIL  [{id}] {name}: over time budget; {detail} ({timing})");
            }
            Fail(detail) => {
                failed += 1;
                println!("FAIL  [{id}] {name}: {detail} ({timing})");
            }
            Blocked(detail) => {
                blocked += 1;
                println!("FAIL  [{id}] {name}: blocked: {detail} ({timing})");
            }
        }
    }
    println!("acceptance: {passed} passed, {failed} failed, {blocked} blocked");
    if failed > 0 || (strict && blocked > 0) {
        std::process::exit(1);
    }
}
