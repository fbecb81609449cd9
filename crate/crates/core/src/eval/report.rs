use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::loso::{FoldResult, SkippedFold};
use super::metrics::Metrics;
use super::task::{TaskId, TaskSpec};
use super::EvalError;
use crate::corpus::{Event, Modality};
use crate::models::{ModelKind, ModelSpec};
use crate::numfmt::round_half_even;
use crate::segment::LabelPolicy;

/// Container tag of serialized evaluation reports.
pub const REPORT_FORMAT: &str = "bruxkit-report-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Balance {
    pub positive: usize,
    pub negative: usize,
}

impl Balance {
    /// Positive windows per negative window.
    pub fn ratio(&self) -> f64 {
        self.positive as f64 / self.negative as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub format: String,
    pub task: TaskId,
    pub positive_event: Event,
    pub modality: Modality,
    pub policy: LabelPolicy,
    pub model: ModelKind,
    pub spec: ModelSpec,
    #[serde(default)]
    pub label_shuffle: Option<u64>,
    pub folds: Vec<FoldResult>,
    pub skipped: Vec<SkippedFold>,
    pub mean: Metrics,
    pub std: Metrics,
    pub balance: Balance,
    pub fingerprint: String,
}

#[derive(Serialize)]
struct Config<'a> {
    task: &'a TaskSpec,
    modality: Modality,
    policy: LabelPolicy,
    spec: &'a ModelSpec,
    label_shuffle: Option<u64>,
}

/// SHA-256 over the canonical JSON of everything that determines a run.
pub(crate) fn fingerprint(
    task: &TaskSpec,
    modality: Modality,
    policy: LabelPolicy,
    spec: &ModelSpec,
    label_shuffle: Option<u64>,
) -> String {
    let config = Config { task, modality, policy, spec, label_shuffle };
    let json = serde_json::to_vec(&config).expect("config serializes");
    hex::encode(Sha256::digest(&json))
}

impl EvaluationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        #[derive(Deserialize)]
        struct Probe {
            format: Option<String>,
        }
        let probe: Probe = serde_json::from_str(text)?;
        match probe.format.as_deref() {
            Some(REPORT_FORMAT) => Ok(serde_json::from_str(text)?),
            other => Err(EvalError::UnsupportedFormat(other.unwrap_or("").to_string())),
        }
    }

    /// True when every fold predicted a single class for all its windows.
    pub fn all_degenerate(&self) -> bool {
        self.folds.iter().all(|f| f.degenerate)
    }

    pub fn degenerate_folds(&self) -> usize {
        self.folds.iter().filter(|f| f.degenerate).count()
    }

    /// `0.xx±0.yy` for the accuracy cell.
    pub fn accuracy_cell(&self) -> String {
        cell(self.mean.accuracy, self.std.accuracy)
    }
}

fn cell(mean: f64, std: f64) -> String {
    format!("{}±{}", round_half_even(mean, 2), round_half_even(std, 2))
}

const COL: usize = 12;

/// Fixed-width summary of one report.
pub fn render_report(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} ({} vs silent), {}, {}, policy={}",
        report.task, report.positive_event, report.modality, report.model, report.policy
    );
    let _ = writeln!(
        out,
        "windows: {} positive, {} negative (ratio {})",
        report.balance.positive,
        report.balance.negative,
        round_half_even(report.balance.ratio(), 2)
    );
    for name in Metrics::NAMES {
        let _ = write!(out, "{name:>COL$}");
    }
    out.push('\n');
    if report.all_degenerate() {
        for _ in Metrics::NAMES {
            let _ = write!(out, "{:>COL$}", "N/A");
        }
        out.push_str("  (degenerate)\n");
    } else {
        for (m, s) in report.mean.values().into_iter().zip(report.std.values()) {
            let _ = write!(out, "{:>COL$}", cell(m, s));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "folds: {} run, {} skipped", report.folds.len(), report.skipped.len());
    for s in &report.skipped {
        let _ = writeln!(out, "note: fold {} skipped: {}", s.held_out, s.reason);
    }
    let degenerate = report.degenerate_folds();
    if degenerate > 0 {
        let _ = writeln!(out, "note: {degenerate} fold(s) predicted a single class");
    }
    if let Some(seed) = report.label_shuffle {
        let _ = writeln!(out, "note: labels shuffled with seed {seed}");
    }
    out
}

/// Accuracy grid with one row per model and one column per modality.
pub fn render_grid(reports: &[EvaluationReport]) -> String {
    let mut rows: Vec<(TaskId, Event, ModelKind)> = reports.iter().map(|r| (r.task, r.positive_event, r.model)).collect();
    rows.sort();
    rows.dedup();
    let mut out = String::new();
    let _ = write!(out, "{:<24}", "task / model");
    for m in Modality::ALL {
        let _ = write!(out, "{:>16}", m.as_str());
    }
    out.push('\n');
    for (task, event, model) in rows {
        let _ = write!(out, "{:<24}", format!("{task} {event} {model}"));
        for m in Modality::ALL {
            let found = reports
                .iter()
                .find(|r| r.task == task && r.positive_event == event && r.model == model && r.modality == m);
            let text = match found {
                Some(r) if r.all_degenerate() => "N/A (degenerate)".to_string(),
                Some(r) => r.accuracy_cell(),
                None => "-".to_string(),
            };
            let _ = write!(out, "{text:>16}");
        }
        out.push('\n');
    }
    out
}
