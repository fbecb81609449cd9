use std::collections::BTreeSet;

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::task::TaskSpec;
use super::EvalError;
use crate::corpus::{Activity, AnnotationTrack, Corpus, Event, Modality};
use crate::features::{featurize, FEATURE_COUNT};
use crate::models::BinaryLabel;
use crate::segment::{annotation_blocks, segment, LabelPolicy, Window};
use crate::seed;

/// Labelled feature rows of one task, tagged by participant.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub task: TaskSpec,
    pub modality: Modality,
    pub policy: LabelPolicy,
    pub x: Array2<f64>,
    pub labels: Vec<BinaryLabel>,
    pub participants: Vec<String>,
    pub activities: Vec<Activity>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|l| l.is_positive()).count()
    }

    pub fn negatives(&self) -> usize {
        self.len() - self.positives()
    }

    /// Distinct participant ids in lexicographic order.
    pub fn participant_ids(&self) -> Vec<String> {
        self.participants.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn rows(&self, idx: &[usize]) -> Array2<f64> {
        self.x.select(Axis(0), idx)
    }

    pub fn labels_of(&self, idx: &[usize]) -> Vec<BinaryLabel> {
        idx.iter().map(|&i| self.labels[i]).collect()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }

    /// Same rows with labels permuted uniformly at random across the
    /// whole dataset, preserving the class balance.
    pub fn with_shuffled_labels(&self, shuffle_seed: u64) -> Self {
        let mut labels = self.labels.clone();
        labels.shuffle(&mut seed::stream(&[shuffle_seed, 0x5146]));
        Self { labels, ..self.clone() }
    }
}

/// Blocks that contain the positive event and none of the other event.
fn eligible_blocks(track: &AnnotationTrack, task: &TaskSpec) -> BTreeSet<usize> {
    let blocks = annotation_blocks(track);
    let mut has_positive = BTreeSet::new();
    let mut has_other = BTreeSet::new();
    for (iv, &b) in track.intervals().iter().zip(&blocks) {
        if iv.event == task.positive_event {
            has_positive.insert(b);
        } else if iv.event == task.other_event() {
            has_other.insert(b);
        }
    }
    has_positive.difference(&has_other).copied().collect()
}

fn keep(window: &Window, task: &TaskSpec, eligible: &BTreeSet<usize>) -> bool {
    let Some(activity) = window.activity_context else {
        return false;
    };
    if !task.included_activities.contains(&activity) || window.label == task.other_event() {
        return false;
    }
    if task.silent_only_activities.contains(&activity) && window.label != Event::Silent {
        return false;
    }
    !task.block_scoped || window.block.is_some_and(|b| eligible.contains(&b))
}

/// Segment, filter and featurize every session for `task`.
pub fn build_dataset(
    corpus: &Corpus,
    task: &TaskSpec,
    modality: Modality,
    policy: LabelPolicy,
) -> Result<Dataset, EvalError> {
    let mut windows = Vec::new();
    for session in corpus.sessions() {
        let eligible = eligible_blocks(&session.track, task);
        let ws = segment(&session.recording, &session.track, modality, policy)?;
        windows.extend(ws.into_iter().filter(|w| keep(w, task, &eligible)));
    }

    let features: Vec<Vec<f64>> = windows.par_iter().map(|w| featurize(w).values).collect();
    let mut flat = Vec::with_capacity(features.len() * FEATURE_COUNT);
    for f in &features {
        flat.extend_from_slice(f);
    }
    let x = Array2::from_shape_vec((features.len(), FEATURE_COUNT), flat).expect("71 columns per row");
    let labels: Vec<BinaryLabel> = windows
        .iter()
        .map(|w| if w.label == task.positive_event { BinaryLabel::Positive } else { BinaryLabel::Silent })
        .collect();

    let positive = labels.iter().filter(|l| l.is_positive()).count();
    let silent = labels.len() - positive;
    if positive == 0 || silent == 0 {
        return Err(EvalError::EmptyClass { positive, silent });
    }
    Ok(Dataset {
        task: task.clone(),
        modality,
        policy,
        x,
        labels,
        participants: windows.iter().map(|w| w.participant_id.clone()).collect(),
        activities: windows.iter().map(|w| w.activity_context.expect("kept windows are annotated")).collect(),
    })
}
