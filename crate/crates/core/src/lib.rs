//! Bruxism event detection from dual-ear IMU recordings.
//!
//! The pipeline runs in five stages, each in its own module:
//!
//! - [`corpus`]: on-disk recording/annotation formats and label lookup
//! - [`segment`]: 8-sample sliding windows with 50% overlap and window labels
//! - [`features`]: the 71-value per-window descriptor
//! - [`models`]: decision tree, kNN, logistic regression, random forest and RBF SVM
//! - [`eval`]: task datasets, leave-one-subject-out evaluation and report tables
//!
//! [`synth`] generates a deterministic stand-in corpus that follows the
//! recording protocol, so every stage can be exercised without human data.

pub mod corpus;
pub mod eval;
pub mod features;
pub mod models;
pub mod numfmt;
pub mod seed;
pub mod segment;
pub mod synth;

pub use corpus::{Activity, AnnotationTrack, Event, ImuSample, Modality, Recording};
pub use eval::{EvaluationReport, TaskId, TaskSpec};
pub use features::FeatureVector;
pub use models::{BinaryLabel, ModelKind, ModelSpec, TrainedModel};
pub use segment::{LabelPolicy, Window};

/// Nominal sample rate of every recording, in Hz.
pub const SAMPLE_RATE_HZ: f64 = 5.0;
/// Window length in samples (1.6 s at 5 Hz).
pub const WINDOW_LEN: usize = 8;
/// Hop between window starts in samples (50% overlap).
pub const WINDOW_HOP: usize = 4;
/// Number of channels of one modality (3 axes x 2 ears).
pub const AXES: usize = 6;
