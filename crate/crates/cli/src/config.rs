use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bruxkit::corpus::{Event, Modality};
use bruxkit::eval::{TaskId, TaskSpec};
use bruxkit::models::{ModelKind, ModelSpec};
use bruxkit::segment::LabelPolicy;
use serde::Deserialize;

/// Evaluation settings as read from a TOML file. Every field is optional so
/// that command-line flags can fill in or override any of them.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub corpus_dir: Option<PathBuf>,
    pub task: Option<String>,
    pub event: Option<String>,
    pub modality: Option<String>,
    pub label_policy: Option<String>,
    pub model: Option<String>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub shuffle_labels: Option<u64>,
    #[serde(default)]
    pub hyperparameters: BTreeMap<String, toml::Value>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Fully resolved evaluation run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub corpus_dir: PathBuf,
    pub task: TaskSpec,
    pub modality: Modality,
    pub policy: LabelPolicy,
    pub spec: ModelSpec,
    pub output_dir: PathBuf,
    pub shuffle_labels: Option<u64>,
}

/// Flag values; `None` means "not given on the command line".
#[derive(Debug, Default)]
pub struct Overrides {
    pub corpus_dir: Option<PathBuf>,
    pub task: Option<TaskId>,
    pub event: Option<Event>,
    pub modality: Option<Modality>,
    pub policy: Option<LabelPolicy>,
    pub model: Option<ModelKind>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub shuffle_labels: Option<u64>,
    pub set: Vec<(String, String)>,
}

fn parse_field<T>(name: &str, value: &str) -> Result<T>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| anyhow::anyhow!("config `{name}`: {e}"))
}

fn value_text(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl RunConfig {
    /// Merge the file (if any) with flags; flags win.
    pub fn resolve(file: FileConfig, flags: Overrides) -> Result<Self> {
        let task = match (flags.task, &file.task) {
            (Some(t), _) => t,
            (None, Some(t)) => parse_field("task", t)?,
            (None, None) => bail!("no task given (use --task or `task` in the config)"),
        };
        let event = match (flags.event, &file.event) {
            (Some(e), _) => Some(e),
            (None, Some(e)) => Some(parse_field("event", e)?),
            (None, None) => None,
        };
        let task_spec = match event {
            Some(Event::Silent) => bail!("the positive event must be grinding or clenching"),
            Some(e) => TaskSpec::new(task, e),
            None => TaskSpec::for_id(task),
        };
        let modality = match (flags.modality, &file.modality) {
            (Some(m), _) => m,
            (None, Some(m)) => parse_field("modality", m)?,
            (None, None) => Modality::Gyroscope,
        };
        let policy = match (flags.policy, &file.label_policy) {
            (Some(p), _) => p,
            (None, Some(p)) => parse_field("label_policy", p)?,
            (None, None) => LabelPolicy::default(),
        };
        let kind = match (flags.model, &file.model) {
            (Some(k), _) => k,
            (None, Some(k)) => parse_field("model", k)?,
            (None, None) => ModelKind::Svm,
        };
        let seed = flags.seed.or(file.seed).unwrap_or(0);
        let file_params: Vec<(String, String)> =
            file.hyperparameters.iter().map(|(k, v)| (k.clone(), value_text(v))).collect();
        let spec = ModelSpec::new(kind, seed)
            .with_overrides(file_params.iter().chain(&flags.set).map(|(k, v)| (k.as_str(), v.as_str())))?;
        Ok(Self {
            corpus_dir: flags
                .corpus_dir
                .or(file.corpus_dir)
                .context("no corpus directory given (use --corpus or `corpus_dir` in the config)")?,
            task: task_spec,
            modality,
            policy,
            spec,
            output_dir: flags.output_dir.or(file.output_dir).unwrap_or_else(|| PathBuf::from("runs")),
            shuffle_labels: flags.shuffle_labels.or(file.shuffle_labels),
        })
    }
}

/// Split `key=value`.
pub fn parse_assignment(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}
