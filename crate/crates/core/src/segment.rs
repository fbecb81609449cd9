//! Sliding-window segmentation and window labelling.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Activity, AnnotationTrack, Event, Modality, Recording};
use crate::numfmt::sig9;
use crate::{AXES, WINDOW_HOP, WINDOW_LEN};

#[derive(Debug, Error, PartialEq)]
pub enum SegmentError {
    #[error("window at sample {start_index} mixes grinding and clenching")]
    MixedEvents { start_index: usize },
    #[error("expected {expected} per-sample events, got {got}")]
    WrongLength { expected: usize, got: usize },
}

/// How a window's per-sample events collapse to one label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelPolicy {
    /// Majority event; an even split resolves to silent.
    #[default]
    DominantEvent,
    /// Silent only when every sample is silent.
    StrictSilent,
}

impl LabelPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            LabelPolicy::DominantEvent => "dominant_event",
            LabelPolicy::StrictSilent => "strict_silent",
        }
    }
}

impl fmt::Display for LabelPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LabelPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dominant_event" | "dominant" => Ok(LabelPolicy::DominantEvent),
            "strict_silent" | "strict" => Ok(LabelPolicy::StrictSilent),
            _ => Err(format!("unknown label policy `{s}`")),
        }
    }
}

/// Eight consecutive samples of one modality with a resolved label.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub participant_id: String,
    pub modality: Modality,
    pub start_index: usize,
    /// Time-major rows, columns `x_l, y_l, z_l, x_r, y_r, z_r`.
    pub samples: [[f64; AXES]; WINDOW_LEN],
    pub label: Event,
    /// Most frequent activity among annotated samples; `None` when no
    /// sample of the window lies inside an annotated interval.
    pub activity_context: Option<Activity>,
    /// Index of the annotation block most of the window's samples fall in.
    pub block: Option<usize>,
}

impl Window {
    /// One axis as an 8-sample signal.
    pub fn axis(&self, axis: usize) -> [f64; WINDOW_LEN] {
        std::array::from_fn(|t| self.samples[t][axis])
    }
}

/// Number of full windows of `window_len` samples spaced `hop` apart.
pub fn window_count(n_samples: usize, window_len: usize, hop: usize) -> usize {
    assert!(window_len >= 1 && hop >= 1, "window_len and hop must be positive");
    if n_samples < window_len {
        0
    } else {
        (n_samples - window_len) / hop + 1
    }
}

/// Collapse the per-sample events of one window to a single label.
pub fn resolve_label(sample_events: &[Event], policy: LabelPolicy) -> Result<Event, SegmentError> {
    if sample_events.len() != WINDOW_LEN {
        return Err(SegmentError::WrongLength { expected: WINDOW_LEN, got: sample_events.len() });
    }
    let count = |e: Event| sample_events.iter().filter(|&&x| x == e).count();
    let (grinding, clenching, silent) = (count(Event::Grinding), count(Event::Clenching), count(Event::Silent));
    let (event, active) = match (grinding, clenching) {
        (0, 0) => return Ok(Event::Silent),
        (g, 0) => (Event::Grinding, g),
        (0, c) => (Event::Clenching, c),
        _ => return Err(SegmentError::MixedEvents { start_index: 0 }),
    };
    Ok(match policy {
        LabelPolicy::DominantEvent if active > silent => event,
        LabelPolicy::DominantEvent => Event::Silent,
        LabelPolicy::StrictSilent => event,
    })
}

/// Contiguous runs of annotation intervals sharing one activity; a gap or
/// an activity change starts a new block. Returns the block index of each
/// interval.
pub fn annotation_blocks(track: &AnnotationTrack) -> Vec<usize> {
    let mut blocks = Vec::with_capacity(track.intervals().len());
    let mut current = 0;
    for (i, iv) in track.intervals().iter().enumerate() {
        if i > 0 {
            let prev = &track.intervals()[i - 1];
            if prev.activity != iv.activity || (iv.start - prev.end).abs() > 1e-9 {
                current += 1;
            }
        }
        blocks.push(current);
    }
    blocks
}

/// Slice a recording into 8-sample windows with a 4-sample hop. Trailing
/// samples that do not fill a window are dropped.
pub fn segment(
    rec: &Recording,
    track: &AnnotationTrack,
    modality: Modality,
    policy: LabelPolicy,
) -> Result<Vec<Window>, SegmentError> {
    let samples = rec.samples();
    let covering: Vec<Option<usize>> = samples.iter().map(|s| track.interval_index_at(s.t)).collect();
    let events: Vec<Event> = covering
        .iter()
        .map(|c| c.map_or(Event::Silent, |i| track.intervals()[i].event))
        .collect();
    let blocks = annotation_blocks(track);

    let n = window_count(samples.len(), WINDOW_LEN, WINDOW_HOP);
    let mut out = Vec::with_capacity(n);
    for w in 0..n {
        let start = w * WINDOW_HOP;
        let range = start..start + WINDOW_LEN;
        let label = resolve_label(&events[range.clone()], policy).map_err(|e| match e {
            SegmentError::MixedEvents { .. } => SegmentError::MixedEvents { start_index: start },
            other => other,
        })?;
        let activities = covering[range.clone()].iter().map(|c| c.map(|i| track.intervals()[i].activity));
        let block_ids = covering[range.clone()].iter().map(|c| c.map(|i| blocks[i]));
        out.push(Window {
            participant_id: rec.participant_id().to_string(),
            modality,
            start_index: start,
            samples: std::array::from_fn(|k| samples[start + k].channels(modality)),
            label,
            activity_context: first_most_frequent(activities),
            block: first_most_frequent(block_ids),
        });
    }
    Ok(out)
}

/// Most frequent `Some` value; ties go to the value seen first.
fn first_most_frequent<T: PartialEq + Copy>(items: impl Iterator<Item = Option<T>>) -> Option<T> {
    let mut counts: Vec<(T, usize)> = Vec::new();
    for item in items.flatten() {
        match counts.iter_mut().find(|(v, _)| *v == item) {
            Some((_, c)) => *c += 1,
            None => counts.push((item, 1)),
        }
    }
    let mut best: Option<(T, usize)> = None;
    for (v, c) in counts {
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((v, c));
        }
    }
    best.map(|(v, _)| v)
}

/// Header of the windows dump.
pub fn windows_csv_header() -> String {
    let mut h = String::from("participant,modality,start_index,label,activity");
    for t in 0..WINDOW_LEN {
        for axis in ["x_l", "y_l", "z_l", "x_r", "y_r", "z_r"] {
            let _ = write!(h, ",s{t}_{axis}");
        }
    }
    h
}

/// One dump row; unannotated windows get an empty activity field.
pub fn windows_csv_row(w: &Window) -> String {
    let mut row = format!(
        "{},{},{},{},{}",
        w.participant_id,
        w.modality,
        w.start_index,
        w.label,
        w.activity_context.map_or("", |a| a.as_str())
    );
    for step in &w.samples {
        for v in step {
            row.push(',');
            row.push_str(&sig9(*v));
        }
    }
    row
}
