//! The `mlagg` command line.
//!
//! Exit codes: 0 on success, 2 for usage and configuration errors, 3 for
//! unreadable or malformed data, 1 for anything else.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::ThreadPool;

use crate::aggregate::{read_member_matrix, write_predictions, Strategy, StrategyKind};
use crate::dataio::{load_dataset, write_csv, Dataset, LabelSpec};
use crate::error::Error;
use crate::experiments::{
    protocol_line, read_scores_csv, render_markdown, run_grid, run_trials, size_sweep, summary_json, write_scores_csv,
    write_sweep_csv, DatasetRef, ExperimentConfig, ExpectedLosses, ResultTable, SweepTable,
};
use crate::labels::LabelVector;
use crate::loss::LossKind;

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

/// Environment variable naming the directory searched for datasets given by name.
pub const DATA_DIR_ENV: &str = "MLAGG_DATA_DIR";

#[derive(Debug, Parser)]
#[command(name = "mlagg", version, about = "Loss-aware aggregation for ensembles of multilabel classifiers")]
pub struct Cli {
    /// Maximum number of worker threads [default: available parallelism]
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cross-validate every (dataset, ensemble, strategy, loss) combination
    Run(RunArgs),
    /// Score nested ensembles of increasing size
    Sweep(SweepArgs),
    /// Recompute ranks and significance tests from a scores CSV
    Ranks(RanksArgs),
    /// Simulate the three-label example where label-wise and mode voting disagree
    Toy(ToyArgs),
    /// Convert an ARFF dataset to the CSV interchange format
    Convert(ConvertArgs),
    /// Aggregate member probability matrices into binary predictions
    AggregateFile(AggregateArgs),
}

/// Experiment settings shared by `run` and `sweep`. Flags override the config file.
#[derive(Debug, Args)]
pub struct GridArgs {
    /// Experiment config file (TOML)
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Dataset file, or a name looked up in the data directory; repeatable. Replaces the config's datasets
    #[arg(long = "dataset", value_name = "PATH|NAME")]
    pub datasets: Vec<String>,
    /// Directory searched for datasets given by name [default: $MLAGG_DATA_DIR, else ./data]
    #[arg(long, value_name = "DIR")]
    pub data_dir: Option<PathBuf>,
    /// Ensemble kinds: ebr, ecc, emodt (comma-separated or repeated)
    #[arg(long = "ensemble", value_name = "KIND", value_delimiter = ',')]
    pub ensembles: Vec<String>,
    /// Ensemble size
    #[arg(long, value_name = "M")]
    pub m: Option<usize>,
    /// Strategies: gmv, bmv, ctp, ptc-lw, ptc-mode (comma-separated or repeated)
    #[arg(long = "strategy", value_name = "NAME", value_delimiter = ',')]
    pub strategies: Vec<String>,
    /// Losses: hamming, subset01, f1 (comma-separated or repeated)
    #[arg(long = "loss", value_name = "NAME", value_delimiter = ',')]
    pub losses: Vec<String>,
    /// Number of cross-validation folds
    #[arg(long, value_name = "K")]
    pub folds: Option<usize>,
    /// Number of repetitions of the cross-validation
    #[arg(long, value_name = "R")]
    pub repeats: Option<usize>,
    /// Master seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, value_name = "DIR", default_value = "results")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Ensemble sizes, ascending
    #[arg(long, value_delimiter = ',', default_value = "1,5,10,20,30,40,50,60,70,80,90,100")]
    pub sizes: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct RanksArgs {
    /// Scores CSV written by `run`
    pub scores: PathBuf,
    /// Print the JSON summary instead of markdown
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ToyArgs {
    /// Members per simulated ensemble
    #[arg(long, default_value_t = 10_000)]
    pub m: usize,
    /// Number of simulated ensembles
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Print JSON instead of text
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// ARFF or interchange CSV file
    pub input: PathBuf,
    /// Destination CSV file
    #[arg(long, short, value_name = "FILE")]
    pub output: PathBuf,
    /// MULAN XML label header [default: input with .xml extension]
    #[arg(long, value_name = "FILE", conflicts_with = "last_labels")]
    pub labels: Option<PathBuf>,
    /// Treat the last K attributes as labels instead of reading an XML header
    #[arg(long, value_name = "K")]
    pub last_labels: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    /// One probability matrix per member: a row per instance, a column per label
    #[arg(required = true, value_name = "FILE")]
    pub members: Vec<PathBuf>,
    /// gmv, bmv, ctp, ptc-lw or ptc-mode
    #[arg(long)]
    pub strategy: String,
    /// Target loss: hamming, subset01 or f1
    #[arg(long, default_value = "hamming")]
    pub loss: String,
    /// Write predictions here instead of standard output
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

/// An error together with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure {
            code: exit_code(&error),
            error,
        }
    }
}

/// Default mapping from error kind to exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_USAGE,
        Error::Parse { .. } | Error::Io { .. } | Error::DimensionMismatch { .. } => EXIT_DATA,
        _ => EXIT_RUNTIME,
    }
}

/// Errors raised while reading input data count as data errors unless they
/// are about configuration.
fn data_failure(error: Error) -> Failure {
    let code = match error {
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    };
    Failure { code, error }
}

type CliResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Normal output goes to `out`, diagnostics to `err`.
pub fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.error);
            f.code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be >= 1".into()).into());
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Failure::from(Error::InvalidInput(format!("thread pool: {e}"))))?;
    match cli.command {
        Command::Run(a) => cmd_run(&a, &pool, out, err),
        Command::Sweep(a) => cmd_sweep(&a, &pool, out),
        Command::Ranks(a) => cmd_ranks(&a, out),
        Command::Toy(a) => cmd_toy(&a, &pool, out),
        Command::Convert(a) => cmd_convert(&a, out),
        Command::AggregateFile(a) => cmd_aggregate_file(&a, out),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_RUNTIME,
        error: Error::io(path, e),
    }
}

fn write_file(path: &Path, contents: &[u8]) -> CliResult {
    std::fs::write(path, contents).map_err(|e| io_failure(path, e))
}

fn stdout_failure(e: std::io::Error) -> Failure {
    io_failure(Path::new("<stdout>"), e)
}

fn data_dir(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("data"))
}

/// An existing path is used as given; otherwise `NAME.arff` and then
/// `NAME.csv` are tried inside `dir`.
fn resolve_dataset(arg: &str, dir: &Path) -> std::result::Result<PathBuf, Failure> {
    let direct = PathBuf::from(arg);
    if direct.exists() {
        return Ok(direct);
    }
    for ext in ["arff", "csv"] {
        let candidate = dir.join(format!("{arg}.{ext}"));
        if candidate.exists() {
            return Ok(candidate);
        }
    }
    Err(data_failure(Error::io(
        &direct,
        std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("no such file, and no {arg}.arff or {arg}.csv in {}", dir.display()),
        ),
    )))
}

/// Merges config file and flags into a spec plus loaded datasets.
fn prepare(args: &GridArgs) -> std::result::Result<(crate::experiments::ExperimentSpec, Vec<Dataset>), Failure> {
    let (mut config, base) = match &args.config {
        Some(path) => {
            let config = ExperimentConfig::read(path).map_err(|e| match e {
                Error::Io { .. } => data_failure(e),
                other => Failure::from(Error::Config(strip(other))),
            })?;
            let base = path.parent().map_or_else(PathBuf::new, Path::to_path_buf);
            (config, base)
        }
        None => (ExperimentConfig::default(), PathBuf::new()),
    };
    let mut refs: Vec<(DatasetRef, PathBuf)> = config.datasets.drain(..).map(|d| (d, base.clone())).collect();
    if !args.datasets.is_empty() {
        let dir = data_dir(args.data_dir.as_deref());
        refs = args
            .datasets
            .iter()
            .map(|arg| {
                let path = resolve_dataset(arg, &dir)?;
                Ok((
                    DatasetRef {
                        name: None,
                        path,
                        labels: None,
                        last_labels: None,
                    },
                    PathBuf::new(),
                ))
            })
            .collect::<std::result::Result<_, Failure>>()?;
    }
    let list = |v: &[String]| (!v.is_empty()).then(|| v.to_vec());
    if let Some(v) = list(&args.ensembles) {
        config.ensembles = Some(v);
    }
    if let Some(v) = list(&args.strategies) {
        config.strategies = Some(v);
    }
    if let Some(v) = list(&args.losses) {
        config.losses = Some(v);
    }
    config.m = args.m.or(config.m);
    config.folds = args.folds.or(config.folds);
    config.repeats = args.repeats.or(config.repeats);
    config.seed = args.seed.or(config.seed);
    config.datasets = refs.iter().map(|(r, _)| r.clone()).collect();
    let spec = config.into_spec()?;
    if refs.is_empty() {
        return Err(Error::Config("datasets: give --dataset or list datasets in the config".into()).into());
    }
    let datasets = refs
        .iter()
        .map(|(r, base)| r.load(base))
        .collect::<crate::error::Result<Vec<_>>>()
        .map_err(data_failure)?;
    Ok((spec, datasets))
}

fn strip(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}

fn create_out_dir(dir: &Path) -> CliResult {
    std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))
}

fn cmd_run(args: &RunArgs, pool: &ThreadPool, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let (spec, datasets) = prepare(&args.grid)?;
    let table = pool.install(|| run_grid(&spec, &datasets))?;
    let dir = &args.grid.out;
    create_out_dir(dir)?;
    let mut csv = Vec::new();
    write_scores_csv(&table, &mut csv)?;
    write_file(&dir.join("scores.csv"), &csv)?;
    let markdown = format!("{}\n\n{}", protocol_line(&table), render_markdown(&table));
    write_file(&dir.join("table.md"), markdown.as_bytes())?;
    write_file(&dir.join("summary.json"), summary_json(&table)?.as_bytes())?;
    report_missing(&table, err);
    out.write_all(markdown.as_bytes()).map_err(stdout_failure)
}

fn report_missing(table: &ResultTable, err: &mut dyn Write) {
    let mut seen = Vec::new();
    for c in table.cells.iter().filter(|c| c.error.is_some()) {
        let key = (c.dataset.clone(), c.ensemble);
        if !seen.contains(&key) {
            let _ = writeln!(
                err,
                "warning: {} / {} missing: {}",
                c.dataset,
                c.ensemble,
                c.error.as_deref().unwrap_or_default()
            );
            seen.push(key);
        }
    }
}

fn render_sweep(sweep: &SweepTable) -> String {
    let mut s = String::new();
    let mut groups = Vec::new();
    for p in &sweep.points {
        let key = (p.dataset.clone(), p.ensemble, p.loss);
        if !groups.contains(&key) {
            groups.push(key);
        }
    }
    for (dataset, ensemble, loss) in groups {
        let _ = writeln!(s, "## {dataset} / {ensemble} / {loss}\n");
        let _ = write!(s, "| Method |");
        for size in &sweep.sizes {
            let _ = write!(s, " M={size} |");
        }
        let _ = writeln!(s, "\n|---|{}", "---:|".repeat(sweep.sizes.len()));
        let mut strategies = Vec::new();
        for p in sweep.points.iter().filter(|p| p.dataset == dataset && p.ensemble == ensemble && p.loss == loss) {
            if !strategies.contains(&p.strategy) {
                strategies.push(p.strategy);
            }
        }
        for strategy in strategies {
            let _ = write!(s, "| {} |", strategy.label());
            for (_, mean) in sweep.curve(&dataset, ensemble, strategy, loss) {
                let _ = write!(s, " {} |", mean.map_or_else(|| "-".to_string(), |v| format!("{v:.2}")));
            }
            s.push('\n');
        }
        s.push('\n');
    }
    s
}

fn cmd_sweep(args: &SweepArgs, pool: &ThreadPool, out: &mut dyn Write) -> CliResult {
    let (spec, datasets) = prepare(&args.grid)?;
    let sweep = pool.install(|| size_sweep(&spec, &datasets, &args.sizes))?;
    let dir = &args.grid.out;
    create_out_dir(dir)?;
    let mut csv = Vec::new();
    write_sweep_csv(&sweep, &mut csv)?;
    write_file(&dir.join("sweep.csv"), &csv)?;
    let text = render_sweep(&sweep);
    write_file(&dir.join("sweep.md"), text.as_bytes())?;
    out.write_all(text.as_bytes()).map_err(stdout_failure)
}

fn cmd_ranks(args: &RanksArgs, out: &mut dyn Write) -> CliResult {
    let file = std::fs::File::open(&args.scores).map_err(|e| data_failure(Error::io(&args.scores, e)))?;
    let table = read_scores_csv(std::io::BufReader::new(file), &args.scores.display().to_string()).map_err(data_failure)?;
    let text = if args.json {
        summary_json(&table)? + "\n"
    } else {
        render_markdown(&table)
    };
    out.write_all(text.as_bytes()).map_err(stdout_failure)
}

fn cmd_toy(args: &ToyArgs, pool: &ThreadPool, out: &mut dyn Write) -> CliResult {
    if args.m == 0 {
        return Err(Error::Config("--m: ensemble size must be >= 1".into()).into());
    }
    if args.trials == 0 {
        return Err(Error::Config("--trials: must be >= 1".into()).into());
    }
    let trials = pool.install(|| run_trials(args.m, args.trials, args.seed))?;
    if args.json {
        let mut text = serde_json::to_string_pretty(&trials)
            .map_err(|e| Failure::from(Error::InvalidInput(format!("serializing toy report: {e}"))))?;
        text.push('\n');
        return out.write_all(text.as_bytes()).map_err(stdout_failure);
    }
    let zero = LabelVector::zeros(3);
    let ones = LabelVector::from_code(0b111, 3);
    let mut s = String::new();
    let _ = writeln!(s, "toy problem: {} trial(s) of {} member(s), seed {}", args.trials, args.m, args.seed);
    let _ = writeln!(s, "expected loss under the true distribution (percent):");
    let _ = writeln!(s, "  prediction   hamming  subset01");
    for y in [&zero, &ones] {
        let e = ExpectedLosses::of(y);
        let _ = writeln!(s, "  {:<11} {:>8.2} {:>9.2}", y.to_string(), 100.0 * e.hamming, 100.0 * e.subset_zero_one);
    }
    let shown = trials.outcomes.len().min(10);
    for (t, o) in trials.outcomes.iter().take(shown).enumerate() {
        let _ = writeln!(s, "trial {t}: PTC-lw {}  PTC-mode {}", o.label_wise, o.mode);
    }
    if shown < trials.outcomes.len() {
        let _ = writeln!(s, "({} more trials not shown)", trials.outcomes.len() - shown);
    }
    let _ = writeln!(
        s,
        "PTC-mode = {zero} in {}/{} trials ({:.2})",
        trials.mode_all_zero,
        trials.trials,
        trials.mode_frequency()
    );
    let _ = writeln!(
        s,
        "PTC-lw   = {ones} in {}/{} trials ({:.2})",
        trials.label_wise_all_one,
        trials.trials,
        trials.label_wise_frequency()
    );
    out.write_all(s.as_bytes()).map_err(stdout_failure)
}

fn cmd_convert(args: &ConvertArgs, out: &mut dyn Write) -> CliResult {
    let spec = args.last_labels.map(LabelSpec::Last);
    let data = load_dataset(&args.input, args.labels.as_deref(), spec.as_ref()).map_err(data_failure)?;
    write_csv(&data, &args.output).map_err(|e| Failure {
        code: EXIT_RUNTIME,
        error: e,
    })?;
    writeln!(
        out,
        "{}: {} instances, {} features, {} labels -> {}",
        data.name(),
        data.num_instances(),
        data.num_features(),
        data.num_labels(),
        args.output.display()
    )
    .map_err(stdout_failure)
}

fn cmd_aggregate_file(args: &AggregateArgs, out: &mut dyn Write) -> CliResult {
    let kind: StrategyKind = args.strategy.parse().map_err(|e| Error::Config(format!("--strategy: {}", strip(e))))?;
    let loss: LossKind = args.loss.parse().map_err(|e| Error::Config(format!("--loss: {}", strip(e))))?;
    let matrices = args
        .members
        .iter()
        .map(|p| read_member_matrix(p))
        .collect::<crate::error::Result<Vec<_>>>()
        .map_err(data_failure)?;
    let first = &matrices[0];
    for (m, path) in matrices.iter().zip(&args.members).skip(1) {
        if m.num_rows() != first.num_rows() || m.num_labels() != first.num_labels() {
            return Err(data_failure(Error::InvalidInput(format!(
                "{}: shape {}x{} differs from {}: {}x{}",
                path.display(),
                m.num_rows(),
                m.num_labels(),
                args.members[0].display(),
                first.num_rows(),
                first.num_labels()
            ))));
        }
    }
    let strategy = Strategy::new(kind, loss);
    let predictions = (0..first.num_rows())
        .map(|i| {
            let members: Vec<_> = matrices.iter().map(|m| m.rows()[i].clone()).collect();
            strategy.apply(&members)
        })
        .collect::<crate::error::Result<Vec<_>>>()?;
    match &args.output {
        Some(path) => {
            let mut buf = Vec::new();
            write_predictions(&mut buf, &predictions).map_err(stdout_failure)?;
            write_file(path, &buf)
        }
        None => write_predictions(out, &predictions).map_err(stdout_failure),
    }
}
