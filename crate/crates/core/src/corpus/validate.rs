use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{AnnotationTrack, Event, Recording};

/// A problem found while cross-checking a recording and its annotations.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    ParticipantMismatch { recording: String, annotations: String },
    IntervalOutOfRange { index: usize, start: f64, end: f64, recording_end: f64 },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::ParticipantMismatch { recording, annotations } => {
                write!(f, "participant mismatch: recording `{recording}`, annotations `{annotations}`")
            }
            Issue::IntervalOutOfRange { index, start, end, recording_end } => write!(
                f,
                "interval out of range: #{index} [{start}, {end}) extends past the last sample at {recording_end} s"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub participant_id: String,
    pub issues: Vec<Issue>,
    /// Seconds of each event inside `[0, last_t)`; the three totals sum to
    /// `last_t`.
    pub coverage: BTreeMap<Event, f64>,
    pub samples: usize,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }
}

pub fn validate_pair(rec: &Recording, track: &AnnotationTrack) -> ValidationReport {
    let mut issues = Vec::new();
    if rec.participant_id() != track.participant_id() {
        issues.push(Issue::ParticipantMismatch {
            recording: rec.participant_id().to_string(),
            annotations: track.participant_id().to_string(),
        });
    }
    let last_t = rec.last_t();
    // intervals may close exactly one period after the final sample
    let limit = rec.end_t() + 1e-9;
    let mut grinding = 0.0;
    let mut clenching = 0.0;
    for (index, iv) in track.intervals().iter().enumerate() {
        if iv.end > limit {
            issues.push(Issue::IntervalOutOfRange { index, start: iv.start, end: iv.end, recording_end: last_t });
        }
        let clipped = (iv.end.min(last_t) - iv.start.max(0.0)).max(0.0);
        match iv.event {
            Event::Grinding => grinding += clipped,
            Event::Clenching => clenching += clipped,
            Event::Silent => {}
        }
    }
    let coverage = BTreeMap::from([
        (Event::Grinding, grinding),
        (Event::Clenching, clenching),
        (Event::Silent, last_t - grinding - clenching),
    ]);
    ValidationReport { participant_id: rec.participant_id().to_string(), issues, coverage, samples: rec.len() }
}
