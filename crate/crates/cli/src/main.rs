//! `bruxkit` command-line front end.
//!
//! Exit codes: 0 success, 2 input/output or validation failure, 3 a task
//! dataset lacks one class, 4 every fold predicted a single class, 5 every
//! fold was skipped, 64 usage error.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bruxkit::corpus::{load_annotations, load_recording, validate_pair, Corpus, Event, Modality, Session};
use bruxkit::eval::{
    build_dataset, loso_evaluate_tagged, render_grid, render_report, EvalError, EvaluationReport, TaskId, TaskSpec,
};
use bruxkit::features::{features_csv_header, features_csv_row, featurize};
use bruxkit::models::{predict, train, ModelKind, ModelSpec};
use bruxkit::numfmt::round_half_even;
use bruxkit::segment::{segment, LabelPolicy};
use bruxkit::synth::{generate_corpus, synthesize, CorpusOptions, ScriptKind, SynthError, DEFAULT_SEED};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{parse_assignment, FileConfig, Overrides, RunConfig};

const EXIT_IO: u8 = 2;
const EXIT_EMPTY_CLASS: u8 = 3;
const EXIT_DEGENERATE: u8 = 4;
const EXIT_NO_FOLDS: u8 = 5;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "bruxkit", version, about = "Bruxism event detection from dual-ear IMU recordings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a deterministic synthetic corpus.
    Synth(SynthArgs),
    /// Check recordings against their annotations and print an issue report.
    Validate(ValidateArgs),
    /// Dump the 71-feature matrix of every window.
    Featurize(FeaturizeArgs),
    /// Train one model on a fixed split and write it to a file.
    Train(TrainArgs),
    /// Run leave-one-subject-out evaluation and write the report.
    Evaluate(EvaluateArgs),
    /// Render saved reports as tables.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScriptArg {
    Standard,
    Minimal,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Number of participants (at least 2).
    #[arg(long, default_value_t = 13)]
    participants: usize,
    /// Master seed the participant profiles are drawn from.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Scale of the grinding and clenching signatures; below 1 makes events
    /// harder to detect.
    #[arg(long, default_value_t = 1.0)]
    event_gain: f64,
    /// Session script.
    #[arg(long, value_enum, default_value = "standard")]
    script: ScriptArg,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Corpus directory of `<id>.csv` / `<id>.json` pairs.
    #[arg(long, conflicts_with_all = ["recording", "annotations"])]
    corpus: Option<PathBuf>,
    /// A single recording CSV.
    #[arg(long, requires = "annotations")]
    recording: Option<PathBuf>,
    /// Annotations of the single recording.
    #[arg(long, requires = "recording")]
    annotations: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FeaturizeArgs {
    /// Corpus directory.
    #[arg(long)]
    corpus: PathBuf,
    /// Output directory; receives `features_<modality>.csv`.
    #[arg(long)]
    out: PathBuf,
    /// Restrict to one modality (default: both).
    #[arg(long)]
    modality: Option<Modality>,
    /// Window labelling policy.
    #[arg(long, default_value = "dominant_event")]
    policy: LabelPolicy,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Corpus directory.
    #[arg(long)]
    corpus: PathBuf,
    /// Task id: task1a, task1b, task2a or task2b.
    #[arg(long)]
    task: TaskId,
    /// Positive event, for the clenching variant of task 2.
    #[arg(long)]
    event: Option<Event>,
    #[arg(long, default_value = "gyroscope")]
    modality: Modality,
    #[arg(long, default_value = "dominant_event")]
    policy: LabelPolicy,
    /// Model kind: svm, random_forest (rf), decision_tree (dt), knn,
    /// logistic_regression (lr).
    #[arg(long, default_value = "svm")]
    model: ModelKind,
    /// Hyperparameter override, repeatable.
    #[arg(long = "set", value_parser = parse_assignment)]
    set: Vec<(String, String)>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Participant left out of training and scored separately.
    #[arg(long)]
    hold_out: Option<String>,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus directory.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Task id: task1a, task1b, task2a or task2b.
    #[arg(long)]
    task: Option<TaskId>,
    /// Positive event, for the clenching variant of task 2.
    #[arg(long)]
    event: Option<Event>,
    /// gyroscope or accelerometer.
    #[arg(long)]
    modality: Option<Modality>,
    /// dominant_event or strict_silent.
    #[arg(long)]
    policy: Option<LabelPolicy>,
    /// Model kind: svm, random_forest (rf), decision_tree (dt), knn,
    /// logistic_regression (lr).
    #[arg(long)]
    model: Option<ModelKind>,
    /// Hyperparameter override, repeatable.
    #[arg(long = "set", value_parser = parse_assignment)]
    set: Vec<(String, String)>,
    /// Model seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Permute labels with this seed before evaluating (chance-level control).
    #[arg(long)]
    shuffle_labels: Option<u64>,
    /// Output root; each run writes to a subdirectory named by its fingerprint.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Report files written by `evaluate`.
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    /// Print one accuracy grid instead of one table per report.
    #[arg(long)]
    grid: bool,
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}

fn cmd_synth(args: SynthArgs, out: &mut impl std::io::Write) -> Result<u8> {
    let opts = CorpusOptions {
        participants: args.participants,
        seed: args.seed,
        event_gain: args.event_gain,
        script: match args.script {
            ScriptArg::Standard => ScriptKind::Standard,
            ScriptArg::Minimal => ScriptKind::Minimal,
        },
    };
    let manifest = generate_corpus(&opts, &args.out)?;
    writeln!(out, "wrote {} participants to {}", manifest.participants.len(), args.out.display())?;
    let corpus = synthesize(&opts)?;
    writeln!(out, "windows per task (dominant_event, positive:silent):")?;
    let tasks = [TaskId::Task1a, TaskId::Task1b].map(TaskSpec::for_id).into_iter().chain(
        [TaskId::Task2a, TaskId::Task2b]
            .into_iter()
            .flat_map(|id| [Event::Grinding, Event::Clenching].map(|e| TaskSpec::new(id, e))),
    );
    for task in tasks {
        let (id, event) = (task.id, task.positive_event);
        {
            match build_dataset(&corpus, &task, Modality::Gyroscope, LabelPolicy::DominantEvent) {
                Ok(ds) => writeln!(out, "  {id} {event}: {}:{}", ds.positives(), ds.negatives())?,
                Err(EvalError::EmptyClass { positive, silent }) => {
                    writeln!(out, "  {id} {event}: {positive}:{silent}")?
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(0)
}

fn cmd_validate(args: ValidateArgs, out: &mut impl std::io::Write) -> Result<u8> {
    let sessions = match (args.corpus, args.recording, args.annotations) {
        (Some(dir), _, _) => Corpus::load_dir(&dir)?.sessions().to_vec(),
        (None, Some(rec), Some(ann)) => vec![Session { recording: load_recording(&rec)?, track: load_annotations(&ann)? }],
        _ => bail!(UsageError("give --corpus or both --recording and --annotations".into())),
    };
    let mut issues = 0;
    for s in &sessions {
        let report = validate_pair(&s.recording, &s.track);
        let cov = |e: Event| round_half_even(report.coverage[&e], 1);
        writeln!(
            out,
            "{}: {} samples, grinding {} s, clenching {} s, silent {} s, {} issue(s)",
            report.participant_id,
            report.samples,
            cov(Event::Grinding),
            cov(Event::Clenching),
            cov(Event::Silent),
            report.issues.len()
        )?;
        for issue in &report.issues {
            writeln!(out, "  {issue}")?;
        }
        issues += report.issues.len();
    }
    Ok(if issues == 0 { 0 } else { EXIT_IO })
}

fn cmd_featurize(args: FeaturizeArgs, out: &mut impl std::io::Write) -> Result<u8> {
    let corpus = Corpus::load_dir(&args.corpus)?;
    create_dir(&args.out)?;
    let modalities = args.modality.map_or(Modality::ALL.to_vec(), |m| vec![m]);
    for modality in modalities {
        let mut text = features_csv_header();
        text.push('\n');
        let mut rows = 0;
        for s in corpus.sessions() {
            for w in segment(&s.recording, &s.track, modality, args.policy)? {
                text.push_str(&features_csv_row(&featurize(&w)));
                text.push('\n');
                rows += 1;
            }
        }
        let path = args.out.join(format!("features_{modality}.csv"));
        write_file(&path, &text)?;
        writeln!(out, "{modality}: {rows} rows -> {}", path.display())?;
    }
    Ok(0)
}

fn accuracy(truth: &[bruxkit::BinaryLabel], predicted: &[bruxkit::BinaryLabel]) -> f64 {
    truth.iter().zip(predicted).filter(|(a, b)| a == b).count() as f64 / truth.len().max(1) as f64
}

fn cmd_train(args: TrainArgs, out: &mut impl std::io::Write) -> Result<u8> {
    let corpus = Corpus::load_dir(&args.corpus)?;
    let task = match args.event {
        Some(e) => TaskSpec::new(args.task, e),
        None => TaskSpec::for_id(args.task),
    };
    let ds = build_dataset(&corpus, &task, args.modality, args.policy)?;
    let spec = ModelSpec::new(args.model, args.seed)
        .with_overrides(args.set.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
    let held = args.hold_out.as_deref();
    if let Some(id) = held {
        if !ds.participants.iter().any(|p| p == id) {
            bail!(UsageError(format!("participant `{id}` has no windows in {}", args.task)));
        }
    }
    let (train_idx, test_idx): (Vec<usize>, Vec<usize>) =
        (0..ds.len()).partition(|&i| Some(ds.participants[i].as_str()) != held);
    let model = train(&spec, ds.rows(&train_idx).view(), &ds.labels_of(&train_idx))?;
    write_file(&args.out, &model.to_json())?;
    let train_pred = predict(&model, ds.rows(&train_idx).view())?;
    writeln!(out, "model written to {}", args.out.display())?;
    writeln!(
        out,
        "training accuracy: {} ({} windows)",
        round_half_even(accuracy(&ds.labels_of(&train_idx), &train_pred), 4),
        train_idx.len()
    )?;
    if let Some(id) = held {
        let pred = predict(&model, ds.rows(&test_idx).view())?;
        writeln!(
            out,
            "held-out {id} accuracy: {} ({} windows)",
            round_half_even(accuracy(&ds.labels_of(&test_idx), &pred), 4),
            test_idx.len()
        )?;
    }
    Ok(0)
}

fn cmd_evaluate(args: EvaluateArgs, out: &mut impl std::io::Write) -> Result<u8> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let flags = Overrides {
        corpus_dir: args.corpus,
        task: args.task,
        event: args.event,
        modality: args.modality,
        policy: args.policy,
        model: args.model,
        seed: args.seed,
        output_dir: args.out,
        shuffle_labels: args.shuffle_labels,
        set: args.set,
    };
    let run = RunConfig::resolve(file, flags).map_err(|e| UsageError(format!("{e:#}")))?;
    let corpus = Corpus::load_dir(&run.corpus_dir)?;
    let mut ds = build_dataset(&corpus, &run.task, run.modality, run.policy)?;
    if let Some(seed) = run.shuffle_labels {
        ds = ds.with_shuffled_labels(seed);
    }
    let report = loso_evaluate_tagged(&ds, &run.spec, run.shuffle_labels)?;
    let dir = run.output_dir.join(&report.fingerprint[..16]);
    create_dir(&dir)?;
    let table = render_report(&report);
    write_file(&dir.join("report.json"), &report.to_json())?;
    write_file(&dir.join("table.txt"), &table)?;
    write!(out, "{table}")?;
    writeln!(out, "report written to {}", dir.join("report.json").display())?;
    Ok(if report.all_degenerate() { EXIT_DEGENERATE } else { 0 })
}

fn cmd_report(args: ReportArgs, out: &mut impl std::io::Write) -> Result<u8> {
    let mut reports = Vec::with_capacity(args.reports.len());
    for path in &args.reports {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        reports.push(EvaluationReport::from_json(&text).with_context(|| format!("parsing {}", path.display()))?);
    }
    if args.grid {
        write!(out, "{}", render_grid(&reports))?;
    } else {
        for (i, r) in reports.iter().enumerate() {
            if i > 0 {
                writeln!(out)?;
            }
            write!(out, "{}", render_report(r))?;
        }
    }
    Ok(0)
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        match cause.downcast_ref::<EvalError>() {
            Some(EvalError::EmptyClass { .. }) => return EXIT_EMPTY_CLASS,
            Some(EvalError::NoFolds) => return EXIT_NO_FOLDS,
            _ => {}
        }
        if let Some(SynthError::InvalidGain(_)) = cause.downcast_ref::<SynthError>() {
            return EXIT_USAGE;
        }
    }
    EXIT_IO
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("BRUXKIT_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| UsageError(format!("BRUXKIT_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("configuring the thread pool")?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    configure_threads()?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Synth(a) => cmd_synth(a, &mut out),
        Command::Validate(a) => cmd_validate(a, &mut out),
        Command::Featurize(a) => cmd_featurize(a, &mut out),
        Command::Train(a) => cmd_train(a, &mut out),
        Command::Evaluate(a) => cmd_evaluate(a, &mut out),
        Command::Report(a) => cmd_report(a, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
