//! End-to-end tests of the `mlagg` binary.
//!
//! Golden help texts live in `tests/golden`; regenerate them with
//! `UPDATE_GOLDEN=1 cargo test --test cli`.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mlagg::dataio::write_csv;
use mlagg::experiments::toy_dataset;

fn mlagg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlagg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

#[test]
fn help_texts_match_golden_files() {
    let commands: [&[&str]; 7] = [
        &["--help"],
        &["run", "--help"],
        &["sweep", "--help"],
        &["ranks", "--help"],
        &["toy", "--help"],
        &["convert", "--help"],
        &["aggregate-file", "--help"],
    ];
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for args in commands {
        let out = mlagg(args);
        assert_eq!(out.status.code(), Some(0));
        let name = if args.len() == 1 { "mlagg".to_string() } else { args[0].to_string() };
        let path = golden_dir().join(format!("{name}.help.txt"));
        if update {
            std::fs::create_dir_all(golden_dir()).unwrap();
            std::fs::write(&path, stdout(&out)).unwrap();
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(stdout(&out), expected, "`mlagg {}` differs from {}", args.join(" "), path.display());
    }
}

#[test]
fn every_flag_is_documented() {
    let help = stdout(&mlagg(&["run", "--help"]));
    for flag in ["--config", "--dataset", "--data-dir", "--ensemble", "--m", "--strategy", "--loss", "--folds", "--repeats", "--seed", "--out", "--threads"] {
        assert!(help.contains(flag), "run --help lacks {flag}");
    }
    let help = stdout(&mlagg(&["sweep", "--help"]));
    assert!(help.contains("--sizes"));
    let help = stdout(&mlagg(&["toy", "--help"]));
    for flag in ["--m", "--trials", "--seed", "--json"] {
        assert!(help.contains(flag), "toy --help lacks {flag}");
    }
}

#[test]
fn toy_usage_and_reports() {
    let out = mlagg(&["toy", "--m", "0"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("--m"));

    let out = mlagg(&["toy", "--m", "1", "--trials", "8", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let trials: Vec<&str> = text.lines().filter(|l| l.starts_with("trial ")).collect();
    assert_eq!(trials.len(), 8);
    for line in trials {
        // "trial t: PTC-lw (a,b,c)  PTC-mode (a,b,c)"
        let parts: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(parts[3], parts[5], "{line}");
    }

    let out = mlagg(&["toy", "--m", "10000", "--trials", "100"]);
    let text = stdout(&out);
    assert!(text.contains("PTC-mode = (0,0,0) in 100/100"), "{text}");
    assert!(text.contains("(1,1,1)        43.75     81.25"), "{text}");

    let out = mlagg(&["toy", "--m", "5", "--trials", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcomes"].as_array().unwrap().len(), 2);
}

fn toy_csv(dir: &Path) -> PathBuf {
    let path = dir.join("toy.csv");
    write_csv(&toy_dataset(80, 0.7, 11).unwrap(), &path).unwrap();
    path
}

#[test]
fn run_is_reproducible_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy_csv(dir.path());
    let config = dir.path().join("exp.toml");
    std::fs::write(
        &config,
        "ensembles = [\"ebr\", \"emodt\"]\nm = 4\nfolds = 3\n[[datasets]]\npath = \"toy.csv\"\n[learner]\nmax_iters = 80\n",
    )
    .unwrap();
    let run = |out: &str, threads: &str| {
        let out_dir = dir.path().join(out);
        let o = mlagg(&[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "7",
            "--out",
            out_dir.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        (stdout(&o), out_dir)
    };
    let (text, a) = run("r1", "1");
    let (_, b) = run("r2", "3");
    let csv_a = std::fs::read(a.join("scores.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read(b.join("scores.csv")).unwrap());
    assert_eq!(std::fs::read(a.join("summary.json")).unwrap(), std::fs::read(b.join("summary.json")).unwrap());
    assert_eq!(std::fs::read_to_string(a.join("table.md")).unwrap(), text);
    assert!(text.contains("## EBR") && text.contains("## EMODT"));
    // 2 ensembles x 5 strategies x 3 losses x 3 folds, plus the header.
    assert_eq!(String::from_utf8(csv_a).unwrap().lines().count(), 1 + 2 * 5 * 3 * 3);

    // A dataset flag replaces the config's list; other flags override keys.
    let o = mlagg(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--dataset",
        data.to_str().unwrap(),
        "--ensemble",
        "emodt",
        "--strategy",
        "gmv,ptc-mode",
        "--loss",
        "subset01",
        "--out",
        dir.path().join("r3").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("r3/scores.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3);

    let o = mlagg(&["ranks", a.join("scores.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("| hamming | CTP | same as GMV |"));
}

#[test]
fn run_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy_csv(dir.path());
    let out_dir = dir.path().join("out");
    let base = ["run", "--dataset", data.to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "--m", "2", "--folds", "2"];

    let o = mlagg(&[&base[..], &["--strategy", "median"]].concat());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("strategies") && stderr(&o).contains("median"), "{}", stderr(&o));

    let o = mlagg(&[&base[..], &["--ensemble", "forest"]].concat());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ensembles"), "{}", stderr(&o));

    let o = mlagg(&["run", "--dataset", "no-such-dataset", "--data-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x0,label:y\n1.0,2\n").unwrap();
    let o = mlagg(&["run", "--dataset", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("bad.csv:2:"), "{}", stderr(&o));

    let cfg = dir.path().join("typo.toml");
    std::fs::write(&cfg, "folds = 10\nseeed = 3\n").unwrap();
    let o = mlagg(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seeed"), "{}", stderr(&o));

    let o = mlagg(&["run", "--bogus-flag"]);
    assert_eq!(o.status.code(), Some(2));
    let o = mlagg(&["toy", "--threads", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_writes_plot_ready_csv() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy_csv(dir.path());
    let out_dir = dir.path().join("sweep");
    let o = mlagg(&[
        "sweep",
        "--dataset",
        data.to_str().unwrap(),
        "--ensemble",
        "emodt",
        "--folds",
        "2",
        "--sizes",
        "1,3",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "dataset,ensemble,strategy,loss,size,score");
    assert_eq!(csv.lines().count(), 1 + 5 * 3 * 2);
    assert!(stdout(&o).contains("| Method | M=1 | M=3 |"));

    let o = mlagg(&["sweep", "--dataset", data.to_str().unwrap(), "--sizes", "5,2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn aggregate_file_contracts() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let a = write("a.csv", "0.9,0.2,0.6\n0.4,0.6,0.5\n0.51,0.49,0.1\n");
    let b = write("b.csv", "0.7,0.1,0.3\n0.3,0.55,0.45\n0.2,0.9,0.8\n");
    let c = write("c.csv", "0.1,0.8,0.6\n0.6,0.4,0.5\n0.5,0.5,0.5\n");

    let run = |args: &[&str]| {
        let o = mlagg(&[&["aggregate-file"], args].concat());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        stdout(&o)
    };
    // A single member: its own Hamming prediction per row.
    for s in ["gmv", "bmv", "ctp", "ptc-lw", "ptc-mode"] {
        assert_eq!(run(&[&a, "--strategy", s]), "1,0,1\n0,1,0\n1,0,0\n", "{s}");
    }
    let members = [a.as_str(), b.as_str(), c.as_str()];
    for (x, y) in [("ctp", "gmv"), ("ptc-lw", "bmv")] {
        for loss in ["hamming", "subset01"] {
            assert_eq!(
                run(&[&members[..], &["--strategy", x, "--loss", loss]].concat()),
                run(&[&members[..], &["--strategy", y]].concat()),
                "{x} vs {y} under {loss}"
            );
        }
    }
    let out_file = dir.path().join("pred.csv");
    run(&[&members[..], &["--strategy", "ptc-mode", "--loss", "f1", "-o", out_file.to_str().unwrap()]].concat());
    assert_eq!(std::fs::read_to_string(&out_file).unwrap().lines().count(), 3);

    let bad = write("bad.csv", "0.1,0.2,0.3\n1.2,0.5,0.5\n0.1,0.1,0.1\n");
    let o = mlagg(&["aggregate-file", &a, &bad, "--strategy", "gmv"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("row 2, column 1"), "{}", stderr(&o));

    let short = write("short.csv", "0.1,0.2,0.3\n");
    let o = mlagg(&["aggregate-file", &a, &short, "--strategy", "gmv"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let narrow = write("narrow.csv", "0.1,0.2\n0.1,0.2\n0.1,0.2\n");
    let o = mlagg(&["aggregate-file", &a, &narrow, "--strategy", "gmv"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    let o = mlagg(&["aggregate-file", &a, "--strategy", "median"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn convert_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let arff = dir.path().join("tiny.arff");
    std::fs::write(
        &arff,
        "@relation tiny\n@attribute a numeric\n@attribute c {u,v}\n@attribute y1 {0,1}\n@attribute y2 {0,1}\n@data\n1.25,v,1,0\n?,u,0,1\n",
    )
    .unwrap();
    let csv = dir.path().join("tiny.csv");
    let o = mlagg(&["convert", arff.to_str().unwrap(), "--last-labels", "2", "-o", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("2 instances, 3 features, 2 labels"));
    assert_eq!(
        std::fs::read_to_string(&csv).unwrap(),
        "a,c=u,c=v,label:y1,label:y2\n1.25,0.0,1.0,1,0\n?,1.0,0.0,0,1\n"
    );
    let o = mlagg(&["convert", arff.to_str().unwrap(), "-o", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "no label header: {}", stderr(&o));
    let fixture = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/malformed/bad_number.arff");
    let o = mlagg(&["convert", fixture.to_str().unwrap(), "--last-labels", "1", "-o", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("bad_number.arff:6:"), "{}", stderr(&o));
}
