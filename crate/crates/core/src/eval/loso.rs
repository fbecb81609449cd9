use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::metrics::{metrics, Confusion, Metrics};
use super::report::{fingerprint, Balance, EvaluationReport, REPORT_FORMAT};
use super::EvalError;
use crate::corpus::Activity;
use crate::models::{predict, train, ModelError, ModelSpec, TrainedModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub held_out: String,
    pub confusion: Confusion,
    pub metrics: Metrics,
    /// Every test window received the same predicted class.
    pub degenerate: bool,
    pub per_activity: BTreeMap<Activity, Confusion>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedFold {
    pub held_out: String,
    pub reason: String,
}

enum FoldOutcome {
    Done(FoldResult),
    Skipped(SkippedFold),
}

fn split(dataset: &Dataset, held_out: &str) -> (Vec<usize>, Vec<usize>) {
    (0..dataset.len()).partition(|&i| dataset.participants[i] != held_out)
}

/// The model of the fold that holds out `held_out`.
pub fn train_fold(dataset: &Dataset, held_out: &str, spec: &ModelSpec) -> Result<TrainedModel, ModelError> {
    let (train_idx, _) = split(dataset, held_out);
    train(spec, dataset.rows(&train_idx).view(), &dataset.labels_of(&train_idx))
}

fn run_fold(dataset: &Dataset, held_out: &str, spec: &ModelSpec) -> Result<FoldOutcome, EvalError> {
    let (train_idx, test_idx) = split(dataset, held_out);
    let model = match train(spec, dataset.rows(&train_idx).view(), &dataset.labels_of(&train_idx)) {
        Ok(m) => m,
        Err(ModelError::SingleClassTraining) => {
            return Ok(FoldOutcome::Skipped(SkippedFold {
                held_out: held_out.to_string(),
                reason: ModelError::SingleClassTraining.to_string(),
            }))
        }
        Err(e) => return Err(e.into()),
    };
    let truth = dataset.labels_of(&test_idx);
    let predicted = predict(&model, dataset.rows(&test_idx).view())?;
    let confusion = Confusion::from_pairs(&truth, &predicted);
    let mut per_activity: BTreeMap<Activity, Confusion> = BTreeMap::new();
    for ((&i, t), p) in test_idx.iter().zip(&truth).zip(&predicted) {
        per_activity.entry(dataset.activities[i]).or_default().record(*t, *p);
    }
    let degenerate = predicted.windows(2).all(|w| w[0] == w[1]);
    Ok(FoldOutcome::Done(FoldResult {
        held_out: held_out.to_string(),
        metrics: metrics(&confusion),
        confusion,
        degenerate,
        per_activity,
        diagnostics: model.diagnostics(),
    }))
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// One fold per participant (lexicographic order): train on the others,
/// test on the held-out participant. Mean and population std are taken
/// over the folds that ran.
pub fn loso_evaluate(dataset: &Dataset, spec: &ModelSpec) -> Result<EvaluationReport, EvalError> {
    loso_evaluate_tagged(dataset, spec, None)
}

/// As [`loso_evaluate`], recording the label-shuffle seed in the report.
pub fn loso_evaluate_tagged(
    dataset: &Dataset,
    spec: &ModelSpec,
    label_shuffle: Option<u64>,
) -> Result<EvaluationReport, EvalError> {
    let participants = dataset.participant_ids();
    if participants.len() < 2 {
        return Err(EvalError::TooFewParticipants(participants.len()));
    }
    let outcomes: Vec<FoldOutcome> =
        participants.par_iter().map(|p| run_fold(dataset, p, spec)).collect::<Result<_, _>>()?;
    let mut folds = Vec::new();
    let mut skipped = Vec::new();
    for o in outcomes {
        match o {
            FoldOutcome::Done(f) => folds.push(f),
            FoldOutcome::Skipped(s) => skipped.push(s),
        }
    }
    if folds.is_empty() {
        return Err(EvalError::NoFolds);
    }
    let mut mean = [0.0; 4];
    let mut std = [0.0; 4];
    for k in 0..4 {
        (mean[k], std[k]) = mean_std(folds.iter().map(|f| f.metrics.values()[k]));
    }
    Ok(EvaluationReport {
        format: REPORT_FORMAT.to_string(),
        task: dataset.task.id,
        positive_event: dataset.task.positive_event,
        modality: dataset.modality,
        policy: dataset.policy,
        model: spec.kind(),
        spec: spec.clone(),
        label_shuffle,
        folds,
        skipped,
        mean: Metrics::from_values(mean),
        std: Metrics::from_values(std),
        balance: Balance { positive: dataset.positives(), negative: dataset.negatives() },
        fingerprint: fingerprint(&dataset.task, dataset.modality, dataset.policy, spec, label_shuffle),
    })
}
