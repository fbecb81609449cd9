//! Recordings, annotation tracks and the on-disk corpus.
//!
//! A recording is a CSV of dual-ear 6-axis IMU samples at 5 Hz; its
//! annotation track is a JSON list of half-open `[start, end)` intervals,
//! each carrying an event and a background activity. Time not covered by
//! any grinding or clenching interval is silent.

mod annotations;
mod recording;
mod validate;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use annotations::{load_annotations, parse_annotations, write_annotations, AnnotationTrack, Interval};
pub use recording::{load_recording, parse_recording, write_recording, ImuSample, Recording};
pub use validate::{validate_pair, Issue, ValidationReport};

/// Version tag carried by both file formats.
pub const FORMAT_TAG: &str = "bruxkit-v1";

/// Column header of the recording CSV, in byte order.
pub const CSV_HEADER: &str = "t,ax_l,ay_l,az_l,gx_l,gy_l,gz_l,ax_r,ay_r,az_r,gx_r,gy_r,gz_r";

/// Relative tolerance on the spacing of consecutive timestamps.
pub const RATE_TOLERANCE: f64 = 0.10;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("line {line}: timestamp {t} does not increase (previous {prev})")]
    NonMonotoneTime { line: usize, t: f64, prev: f64 },
    #[error("line {line}: sample spacing {delta} s outside {expected} s +/-10%")]
    RateViolation { line: usize, delta: f64, expected: f64 },
    #[error("recording has {got} samples, at least {min} required")]
    TooShort { got: usize, min: usize },
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("missing metadata field `{0}`")]
    MissingMetadata(&'static str),
    #[error("unsupported format `{0}` (expected {FORMAT_TAG})")]
    UnsupportedFormat(String),
    #[error("unsupported sample rate {0} Hz (only 5 Hz recordings are accepted)")]
    UnsupportedRate(f64),
    #[error("interval {index}: start {start} is not before end {end}")]
    InvertedInterval { index: usize, start: f64, end: f64 },
    #[error("intervals {first} and {second} overlap")]
    OverlappingEvents { first: usize, second: usize },
    #[error("unknown {field} label `{value}`")]
    UnknownLabel { field: &'static str, value: String },
    #[error("annotation JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("recording {0} has no annotation file")]
    MissingAnnotations(String),
    #[error("duplicate participant `{0}` in corpus")]
    DuplicateParticipant(String),
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

/// The event present at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    Grinding,
    Clenching,
    Silent,
}

impl Event {
    pub const ALL: [Event; 3] = [Event::Grinding, Event::Clenching, Event::Silent];

    pub fn as_str(self) -> &'static str {
        match self {
            Event::Grinding => "grinding",
            Event::Clenching => "clenching",
            Event::Silent => "silent",
        }
    }

    pub fn is_silent(self) -> bool {
        self == Event::Silent
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Event {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self> {
        Event::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| CorpusError::UnknownLabel { field: "event", value: s.to_string() })
    }
}

/// Background activity performed while an interval was recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activity {
    None,
    HeadMovement,
    Music,
    ChewingBread,
    ChewingGum,
    Reading,
    Drinking,
    Walking,
}

impl Activity {
    pub const ALL: [Activity; 8] = [
        Activity::None,
        Activity::HeadMovement,
        Activity::Music,
        Activity::ChewingBread,
        Activity::ChewingGum,
        Activity::Reading,
        Activity::Drinking,
        Activity::Walking,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Activity::None => "none",
            Activity::HeadMovement => "head_movement",
            Activity::Music => "music",
            Activity::ChewingBread => "chewing_bread",
            Activity::ChewingGum => "chewing_gum",
            Activity::Reading => "reading",
            Activity::Drinking => "drinking",
            Activity::Walking => "walking",
        }
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Activity {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self> {
        Activity::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| CorpusError::UnknownLabel { field: "activity", value: s.to_string() })
    }
}

/// Which sensor of the IMU feeds the downstream stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Gyroscope,
    Accelerometer,
}

impl Modality {
    pub const ALL: [Modality; 2] = [Modality::Gyroscope, Modality::Accelerometer];

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Gyroscope => "gyroscope",
            Modality::Accelerometer => "accelerometer",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modality {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gyroscope" | "gyro" => Ok(Modality::Gyroscope),
            "accelerometer" | "accel" => Ok(Modality::Accelerometer),
            _ => Err(CorpusError::UnknownLabel { field: "modality", value: s.to_string() }),
        }
    }
}

/// One participant's recording together with its annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub recording: Recording,
    pub track: AnnotationTrack,
}

/// All sessions of a corpus, ordered by participant id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    sessions: Vec<Session>,
}

impl Corpus {
    pub fn new(mut sessions: Vec<Session>) -> Result<Self> {
        sessions.sort_by(|a, b| a.recording.participant_id().cmp(b.recording.participant_id()));
        for pair in sessions.windows(2) {
            if pair[0].recording.participant_id() == pair[1].recording.participant_id() {
                return Err(CorpusError::DuplicateParticipant(
                    pair[0].recording.participant_id().to_string(),
                ));
            }
        }
        Ok(Self { sessions })
    }

    /// Load every `<id>.csv` in `dir` together with its `<id>.json`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let entries = std::fs::read_dir(dir).map_err(|source| CorpusError::Io { path: dir.to_path_buf(), source })?;
        let mut csvs: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "csv"))
            .collect();
        csvs.sort();
        let mut sessions = Vec::with_capacity(csvs.len());
        for csv in csvs {
            let json = csv.with_extension("json");
            if !json.exists() {
                return Err(CorpusError::MissingAnnotations(csv.display().to_string()));
            }
            sessions.push(Session { recording: load_recording(&csv)?, track: load_annotations(&json)? });
        }
        Self::new(sessions)
    }

    pub fn sessions(&self) -> &[Session] {
        &self.sessions
    }

    pub fn len(&self) -> usize {
        self.sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.is_empty()
    }

    pub fn participants(&self) -> impl Iterator<Item = &str> {
        self.sessions.iter().map(|s| s.recording.participant_id())
    }
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io { path: path.to_path_buf(), source }
}
