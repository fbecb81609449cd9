use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{io_err, Activity, CorpusError, Event, Result, FORMAT_TAG};

/// A labelled half-open interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
    pub event: Event,
    pub activity: Activity,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t < self.end
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// Validated, start-sorted intervals for one participant.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationTrack {
    participant_id: String,
    intervals: Vec<Interval>,
}

impl AnnotationTrack {
    /// Validate and sort. Indices in errors refer to the input order.
    pub fn new(participant_id: impl Into<String>, intervals: Vec<Interval>) -> Result<Self> {
        for (index, iv) in intervals.iter().enumerate() {
            if !(iv.start.is_finite() && iv.end.is_finite()) || iv.start >= iv.end {
                return Err(CorpusError::InvertedInterval { index, start: iv.start, end: iv.end });
            }
        }
        let mut order: Vec<usize> = (0..intervals.len()).collect();
        order.sort_by(|&a, &b| intervals[a].start.total_cmp(&intervals[b].start).then(a.cmp(&b)));
        for pair in order.windows(2) {
            let (a, b) = (&intervals[pair[0]], &intervals[pair[1]]);
            if b.start < a.end {
                let (first, second) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
                return Err(CorpusError::OverlappingEvents { first, second });
            }
        }
        let intervals = order.into_iter().map(|i| intervals[i]).collect();
        Ok(Self { participant_id: participant_id.into(), intervals })
    }

    pub fn empty(participant_id: impl Into<String>) -> Self {
        Self { participant_id: participant_id.into(), intervals: Vec::new() }
    }

    pub fn participant_id(&self) -> &str {
        &self.participant_id
    }

    /// Intervals sorted by start time.
    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// Index of the interval covering `t`, if any.
    pub fn interval_index_at(&self, t: f64) -> Option<usize> {
        let after = self.intervals.partition_point(|iv| iv.start <= t);
        let idx = after.checked_sub(1)?;
        self.intervals[idx].contains(t).then_some(idx)
    }

    /// The event at `t`; uncovered instants are silent.
    pub fn event_at(&self, t: f64) -> Event {
        self.interval_index_at(t).map_or(Event::Silent, |i| self.intervals[i].event)
    }

    /// The activity at `t`, or `None` outside every annotated interval.
    pub fn activity_at(&self, t: f64) -> Option<Activity> {
        self.interval_index_at(t).map(|i| self.intervals[i].activity)
    }
}

#[derive(Serialize, Deserialize)]
struct RawTrack {
    format: Option<String>,
    participant: String,
    intervals: Vec<RawInterval>,
}

#[derive(Serialize, Deserialize)]
struct RawInterval {
    start: f64,
    end: f64,
    event: String,
    activity: String,
}

pub fn load_annotations(path: &Path) -> Result<AnnotationTrack> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_annotations(&text)
}

pub fn parse_annotations(text: &str) -> Result<AnnotationTrack> {
    let raw: RawTrack = serde_json::from_str(text)?;
    match raw.format {
        Some(f) if f == FORMAT_TAG => {}
        Some(f) => return Err(CorpusError::UnsupportedFormat(f)),
        None => return Err(CorpusError::MissingMetadata("format")),
    }
    let intervals = raw
        .intervals
        .into_iter()
        .map(|r| {
            Ok(Interval { start: r.start, end: r.end, event: r.event.parse()?, activity: r.activity.parse()? })
        })
        .collect::<Result<Vec<_>>>()?;
    AnnotationTrack::new(raw.participant, intervals)
}

pub fn write_annotations(track: &AnnotationTrack) -> String {
    let raw = RawTrack {
        format: Some(FORMAT_TAG.to_string()),
        participant: track.participant_id.clone(),
        intervals: track
            .intervals
            .iter()
            .map(|iv| RawInterval {
                start: iv.start,
                end: iv.end,
                event: iv.event.as_str().to_string(),
                activity: iv.activity.as_str().to_string(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&raw).expect("annotation track serializes");
    s.push('\n');
    s
}
