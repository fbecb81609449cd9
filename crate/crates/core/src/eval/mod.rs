//! Task datasets, leave-one-subject-out evaluation and report tables.

mod dataset;
mod loso;
mod metrics;
mod report;
mod task;

use thiserror::Error;

use crate::corpus::CorpusError;
use crate::models::ModelError;
use crate::segment::SegmentError;

pub use dataset::{build_dataset, Dataset};
pub use loso::{loso_evaluate, loso_evaluate_tagged, train_fold, FoldResult, SkippedFold};
pub use metrics::{metrics, Confusion, Metrics};
pub use report::{render_grid, render_report, Balance, EvaluationReport, REPORT_FORMAT};
pub use task::{TaskId, TaskSpec};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("dataset has {positive} positive and {silent} silent windows; both classes are required")]
    EmptyClass { positive: usize, silent: usize },
    #[error("leave-one-subject-out needs at least 2 participants, dataset has {0}")]
    TooFewParticipants(usize),
    #[error("every fold was skipped")]
    NoFolds,
    #[error("unsupported report format `{0}` (expected {REPORT_FORMAT})")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("report JSON: {0}")]
    Json(#[from] serde_json::Error),
}
