//! Deterministic synthetic corpus following the seven-experiment protocol.
//!
//! Signal shapes are invented. Grinding adds a continuous jaw oscillation
//! to the gyroscope, clenching only a short onset transient, and the
//! accelerometer sees a strongly attenuated copy of both on top of gravity.
//! Every random draw comes from a stream keyed by the participant seed and
//! a stable per-segment key.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{
    parse_recording, write_annotations, write_recording, Activity, AnnotationTrack, Corpus, CorpusError, Event,
    ImuSample, Interval, Recording, Session,
};
use crate::seed;
use crate::SAMPLE_RATE_HZ;

pub const DEFAULT_PARTICIPANTS: usize = 13;
pub const DEFAULT_SEED: u64 = 7;
pub const MANIFEST_FORMAT: &str = "bruxkit-synth-v1";

/// Offset that keeps the grinding displacement one-signed, so the vector
/// magnitude oscillates at the grinding frequency rather than twice it.
const GRIND_OFFSET: f64 = 1.2;
/// Accelerometer response (g) per deg/s of jaw rotation.
const ACCEL_COUPLING: f64 = 0.0005;
const CLENCH_ONSET: [f64; 2] = [1.0, 0.5];
const TARGET_SECONDS: f64 = 1500.0;
const CYCLE_SAMPLES: usize = 50;
const REPS: usize = 6;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("a corpus needs at least 2 participants, got {0}")]
    TooFewParticipants(usize),
    #[error("event gain must be finite and positive, got {0}")]
    InvalidGain(f64),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Per-participant signal parameters. Gyroscope amplitudes are in deg/s,
/// accelerometer noise in g.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantProfile {
    pub id: String,
    pub seed: u64,
    pub dominant_side: Side,
    /// Amplitude multiplier of the dominant side, at least 1.
    pub asymmetry_gain: f64,
    pub grind_freq: f64,
    pub grind_amp: f64,
    pub clench_spike_amp: f64,
    pub activity_noise_amp: f64,
    pub baseline_noise_std: f64,
    pub accel_noise_std: f64,
    /// Per-sample phase jitter of the grinding oscillation, radians.
    pub phase_jitter: f64,
    pub walk_freq: f64,
    /// Unit rotation axis of the jaw motion as seen by the left earbud;
    /// the right earbud sees it mirrored in y.
    pub jaw_axis: [f64; 3],
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

impl ParticipantProfile {
    /// Profile of participant `index` (0-based), drawn from `master_seed`.
    pub fn draw(index: usize, master_seed: u64) -> Self {
        let seed = seed::derive_seed(&[master_seed, index as u64]);
        let mut rng = seed::stream(&[seed, 0x9F0F]);
        let jaw_axis = unit([rng.random_range(0.5..1.0), rng.random_range(0.2..0.6), rng.random_range(0.1..0.4)]);
        Self {
            id: format!("P{:02}", index + 1),
            seed,
            dominant_side: if rng.random_bool(0.5) { Side::Left } else { Side::Right },
            asymmetry_gain: rng.random_range(1.0..1.6),
            grind_freq: rng.random_range(0.8..1.6),
            grind_amp: rng.random_range(8.0..16.0),
            clench_spike_amp: rng.random_range(10.0..20.0),
            activity_noise_amp: rng.random_range(2.0..4.0),
            baseline_noise_std: rng.random_range(0.3..0.6),
            accel_noise_std: rng.random_range(0.008..0.012),
            phase_jitter: 0.2,
            walk_freq: rng.random_range(1.6..1.8),
            jaw_axis,
        }
    }

    /// Scale both event signatures; values below 1 make events harder to
    /// separate from silence.
    pub fn with_event_gain(mut self, gain: f64) -> Self {
        self.grind_amp *= gain;
        self.clench_spike_amp *= gain;
        self
    }

    /// The same profile without any randomness in the signal.
    pub fn noiseless(mut self) -> Self {
        self.baseline_noise_std = 0.0;
        self.accel_noise_std = 0.0;
        self.phase_jitter = 0.0;
        self
    }

    fn side_gains(&self) -> [f64; 2] {
        match self.dominant_side {
            Side::Left => [self.asymmetry_gain, 1.0],
            Side::Right => [1.0, self.asymmetry_gain],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScriptSegment {
    pub samples: usize,
    pub event: Event,
    pub activity: Activity,
    /// Unannotated rest between experiments when false.
    pub annotated: bool,
    /// Stable key of this segment's noise stream.
    pub key: u64,
}

impl ScriptSegment {
    pub fn seconds(&self) -> f64 {
        self.samples as f64 / SAMPLE_RATE_HZ
    }
}

/// Ordered segments of one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolScript {
    pub segments: Vec<ScriptSegment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScriptKind {
    Standard,
    Minimal,
}

struct Block {
    code: u64,
    activity: Activity,
    kind: BlockKind,
}

enum BlockKind {
    /// Event on, pause, six times.
    Cycles(Event),
    /// Activity alone for this many samples.
    Plain(usize),
}

const STANDARD_BLOCKS: [Block; 14] = [
    Block { code: 0x1A, activity: Activity::None, kind: BlockKind::Cycles(Event::Grinding) },
    Block { code: 0x1B, activity: Activity::None, kind: BlockKind::Cycles(Event::Clenching) },
    Block { code: 0x2A, activity: Activity::HeadMovement, kind: BlockKind::Plain(150) },
    Block { code: 0x2B, activity: Activity::HeadMovement, kind: BlockKind::Cycles(Event::Grinding) },
    Block { code: 0x2C, activity: Activity::HeadMovement, kind: BlockKind::Cycles(Event::Clenching) },
    Block { code: 0x3A, activity: Activity::ChewingBread, kind: BlockKind::Plain(300) },
    Block { code: 0x3B, activity: Activity::ChewingGum, kind: BlockKind::Plain(150) },
    Block { code: 0x40, activity: Activity::Reading, kind: BlockKind::Plain(150) },
    Block { code: 0x50, activity: Activity::Drinking, kind: BlockKind::Plain(125) },
    Block { code: 0x6A, activity: Activity::Music, kind: BlockKind::Plain(150) },
    Block { code: 0x6B, activity: Activity::Music, kind: BlockKind::Cycles(Event::Grinding) },
    Block { code: 0x6C, activity: Activity::Music, kind: BlockKind::Cycles(Event::Clenching) },
    Block { code: 0x7A, activity: Activity::Walking, kind: BlockKind::Plain(150) },
    Block { code: 0x7B, activity: Activity::Walking, kind: BlockKind::Cycles(Event::Clenching) },
];

fn block_segments(block: &Block, script_seed: u64) -> Vec<ScriptSegment> {
    let seg = |samples, event, part: u64| ScriptSegment {
        samples,
        event,
        activity: block.activity,
        annotated: true,
        key: seed::derive_seed(&[block.code, part]),
    };
    match block.kind {
        BlockKind::Plain(samples) => vec![seg(samples, Event::Silent, 0)],
        BlockKind::Cycles(event) => {
            let mut rng = seed::stream(&[script_seed, block.code]);
            let mut out = Vec::with_capacity(2 * REPS);
            for rep in 0..REPS as u64 {
                let hold = rng.random_range(29..=31);
                out.push(seg(hold, event, 2 * rep + 1));
                out.push(seg(CYCLE_SAMPLES - hold, Event::Silent, 2 * rep + 2));
            }
            out
        }
    }
}

fn block_samples(block: &Block) -> usize {
    match block.kind {
        BlockKind::Plain(samples) => samples,
        BlockKind::Cycles(_) => REPS * CYCLE_SAMPLES,
    }
}

fn rest(samples: usize, index: u64) -> ScriptSegment {
    ScriptSegment {
        samples,
        event: Event::Silent,
        activity: Activity::None,
        annotated: false,
        key: seed::derive_seed(&[0xBE57, index]),
    }
}

impl ProtocolScript {
    /// Experiments 1 to 7 in order, separated by unannotated rests that
    /// bring the session to about 25 minutes. Event holds are jittered from
    /// `script_seed`.
    pub fn standard(script_seed: u64) -> Self {
        Self::from_blocks(&STANDARD_BLOCKS, script_seed, TARGET_SECONDS)
    }

    /// The still grinding block alone with short rests.
    pub fn minimal(script_seed: u64) -> Self {
        Self::from_blocks(&STANDARD_BLOCKS[..1], script_seed, 80.0)
    }

    pub fn of_kind(kind: ScriptKind, script_seed: u64) -> Self {
        match kind {
            ScriptKind::Standard => Self::standard(script_seed),
            ScriptKind::Minimal => Self::minimal(script_seed),
        }
    }

    fn from_blocks(blocks: &[Block], script_seed: u64, target_seconds: f64) -> Self {
        let target = (target_seconds * SAMPLE_RATE_HZ) as usize;
        let annotated: usize = blocks.iter().map(block_samples).sum();
        let gaps = blocks.len() + 1;
        let mean_gap = target.saturating_sub(annotated) / gaps;
        let mut rng = seed::stream(&[script_seed, 0x6A95]);
        let mut segments = Vec::new();
        for (i, block) in blocks.iter().enumerate() {
            let jitter = mean_gap / 5;
            segments.push(rest(mean_gap - jitter + rng.random_range(0..=2 * jitter), i as u64));
            segments.extend(block_segments(block, script_seed));
        }
        // the closing rest absorbs the jitter
        let used: usize = segments.iter().map(|s| s.samples).sum();
        segments.push(rest(target.saturating_sub(used).max(mean_gap / 2), blocks.len() as u64));
        Self { segments }
    }

    pub fn total_samples(&self) -> usize {
        self.segments.iter().map(|s| s.samples).sum()
    }

    /// Annotated seconds of `event`.
    pub fn event_seconds(&self, event: Event) -> f64 {
        self.segments.iter().filter(|s| s.annotated && s.event == event).map(ScriptSegment::seconds).sum()
    }

    /// Annotation intervals mirroring the annotated segments.
    pub fn intervals(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        let mut k = 0usize;
        for s in &self.segments {
            if s.annotated {
                out.push(Interval {
                    start: k as f64 / SAMPLE_RATE_HZ,
                    end: (k + s.samples) as f64 / SAMPLE_RATE_HZ,
                    event: s.event,
                    activity: s.activity,
                });
            }
            k += s.samples;
        }
        out
    }
}

fn normal(std: f64) -> Normal<f64> {
    Normal::new(0.0, std).expect("noise std is finite and non-negative")
}

fn add(v: &mut [f64; 3], dir: [f64; 3], scale: f64) {
    for (x, d) in v.iter_mut().zip(dir) {
        *x += d * scale;
    }
}

fn mirror(v: [f64; 3]) -> [f64; 3] {
    [v[0], -v[1], v[2]]
}

/// Chewing envelope: bites for the first 70 % of every 3.2 s.
fn chew_envelope(t: f64) -> f64 {
    if (t / 3.2).fract() < 0.7 {
        1.0
    } else {
        0.0
    }
}

/// Structured activity motion at time `t`: (gyro, accel) added to both ears.
fn activity_motion(p: &ParticipantProfile, activity: Activity, t: f64, rng: &mut ChaCha8Rng) -> ([f64; 3], [f64; 3]) {
    let a = p.activity_noise_amp;
    let mut gyro = [0.0; 3];
    let mut accel = [0.0; 3];
    match activity {
        Activity::None => {}
        Activity::HeadMovement => {
            let phase = TAU * 0.35 * t;
            gyro[2] += 8.0 * a * phase.sin();
            accel[0] += 0.04 * phase.cos();
        }
        Activity::Walking => {
            let phase = TAU * p.walk_freq * t;
            gyro[0] += 1.5 * a * phase.sin();
            gyro[1] += 0.8 * a * (0.5 * phase).sin();
            accel[2] += 0.12 * phase.sin() + 0.04 * (2.0 * phase).sin();
            accel[0] += 0.05 * (0.5 * phase).sin();
        }
        Activity::ChewingBread | Activity::ChewingGum => {
            let bite = chew_envelope(t) * (0.6 + (TAU * 1.2 * t).sin());
            add(&mut gyro, p.jaw_axis, 1.5 * a * bite);
            add(&mut accel, p.jaw_axis, 1.5 * a * bite * ACCEL_COUPLING);
        }
        Activity::Reading => {
            let n = normal(0.6 * a);
            gyro = [n.sample(rng), n.sample(rng), n.sample(rng)];
        }
        Activity::Drinking => {
            let tilt = TAU * 0.1 * t;
            gyro[1] += 0.6 * a * tilt.cos();
            accel[0] += 0.1 * tilt.sin();
        }
        Activity::Music => {
            let n = normal(0.15 * a);
            gyro = [n.sample(rng), n.sample(rng), n.sample(rng)];
        }
    }
    (gyro, accel)
}

/// Render `script` for `profile`. The annotations mirror the script exactly.
pub fn generate_participant(profile: &ParticipantProfile, script: &ProtocolScript) -> (Recording, AnnotationTrack) {
    let gains = profile.side_gains();
    let axes = [profile.jaw_axis, mirror(profile.jaw_axis)];
    let gyro_noise = normal(profile.baseline_noise_std);
    let accel_noise = normal(profile.accel_noise_std);
    let jitter = normal(profile.phase_jitter);

    let mut samples = Vec::with_capacity(script.total_samples());
    let mut k = 0usize;
    for seg in &script.segments {
        let mut rng = seed::stream(&[profile.seed, seg.key]);
        let phase0 = rng.random_range(0.0..TAU);
        for j in 0..seg.samples {
            let t = k as f64 / SAMPLE_RATE_HZ;
            let jaw = match (seg.annotated, seg.event) {
                (true, Event::Grinding) => {
                    let tau = j as f64 / SAMPLE_RATE_HZ;
                    let phase = TAU * profile.grind_freq * tau + phase0 + jitter.sample(&mut rng);
                    profile.grind_amp * (GRIND_OFFSET + phase.sin())
                }
                (true, Event::Clenching) => CLENCH_ONSET.get(j).map_or(0.0, |w| w * profile.clench_spike_amp),
                _ => 0.0,
            };
            let (act_gyro, act_accel) = activity_motion(profile, seg.activity, t, &mut rng);
            let mut ears = [([0.0; 3], [0.0, 0.0, 1.0]); 2];
            for (e, (gyro, accel)) in ears.iter_mut().enumerate() {
                add(gyro, axes[e], jaw * gains[e]);
                add(accel, axes[e], jaw * gains[e] * ACCEL_COUPLING);
                add(gyro, act_gyro, 1.0);
                add(accel, act_accel, 1.0);
                for c in 0..3 {
                    gyro[c] += gyro_noise.sample(&mut rng);
                    accel[c] += accel_noise.sample(&mut rng);
                }
            }
            samples.push(ImuSample {
                t,
                accel_left: ears[0].1,
                gyro_left: ears[0].0,
                accel_right: ears[1].1,
                gyro_right: ears[1].0,
            });
            k += 1;
        }
    }
    let recording = Recording::new(profile.id.clone(), SAMPLE_RATE_HZ, samples).expect("generated samples are valid");
    let track = AnnotationTrack::new(profile.id.clone(), script.intervals()).expect("script intervals are disjoint");
    (recording, track)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusOptions {
    pub participants: usize,
    pub seed: u64,
    pub event_gain: f64,
    pub script: ScriptKind,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        Self { participants: DEFAULT_PARTICIPANTS, seed: DEFAULT_SEED, event_gain: 1.0, script: ScriptKind::Standard }
    }
}

impl CorpusOptions {
    fn check(&self) -> Result<(), SynthError> {
        if self.participants < 2 {
            return Err(SynthError::TooFewParticipants(self.participants));
        }
        if !(self.event_gain.is_finite() && self.event_gain > 0.0) {
            return Err(SynthError::InvalidGain(self.event_gain));
        }
        Ok(())
    }

    pub fn profiles(&self) -> Vec<ParticipantProfile> {
        (0..self.participants)
            .map(|i| ParticipantProfile::draw(i, self.seed).with_event_gain(self.event_gain))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub recording: String,
    pub annotations: String,
    /// SHA-256 of the recording and annotation files, concatenated.
    pub sha256: String,
    pub samples: usize,
    pub profile: ParticipantProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub options: CorpusOptions,
    pub participants: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

struct Rendered {
    profile: ParticipantProfile,
    track: AnnotationTrack,
    csv: String,
    json: String,
}

fn render_all(opts: &CorpusOptions) -> Result<Vec<Rendered>, SynthError> {
    opts.check()?;
    Ok(opts
        .profiles()
        .into_par_iter()
        .map(|profile| {
            let script = ProtocolScript::of_kind(opts.script, profile.seed);
            let (rec, track) = generate_participant(&profile, &script);
            Rendered { csv: write_recording(&rec), json: write_annotations(&track), track, profile }
        })
        .collect())
}

/// Build the corpus in memory, with sample values exactly as a round trip
/// through the on-disk files would give.
pub fn synthesize(opts: &CorpusOptions) -> Result<Corpus, SynthError> {
    let sessions = render_all(opts)?
        .into_iter()
        .map(|r| Ok(Session { recording: parse_recording(&r.csv)?, track: r.track }))
        .collect::<Result<Vec<_>, SynthError>>()?;
    Ok(Corpus::new(sessions)?)
}

/// Write `<id>.csv`, `<id>.json` per participant and `manifest.json` to `dir`.
pub fn generate_corpus(opts: &CorpusOptions, dir: &Path) -> Result<Manifest, SynthError> {
    let rendered = render_all(opts)?;
    std::fs::create_dir_all(dir).map_err(|source| SynthError::Io { path: dir.to_path_buf(), source })?;
    let write = |name: &str, text: &str| {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|source| SynthError::Io { path, source })
    };
    let mut entries = Vec::with_capacity(rendered.len());
    for r in rendered {
        let (csv_name, json_name) = (format!("{}.csv", r.profile.id), format!("{}.json", r.profile.id));
        write(&csv_name, &r.csv)?;
        write(&json_name, &r.json)?;
        let mut hasher = Sha256::new();
        hasher.update(r.csv.as_bytes());
        hasher.update(r.json.as_bytes());
        entries.push(ManifestEntry {
            recording: csv_name,
            annotations: json_name,
            sha256: hex::encode(hasher.finalize()),
            samples: r.csv.lines().filter(|l| !l.starts_with('#')).count() - 1,
            profile: r.profile,
        });
    }
    let manifest = Manifest { format: MANIFEST_FORMAT.to_string(), options: opts.clone(), participants: entries };
    write("manifest.json", &manifest.to_json())?;
    Ok(manifest)
}
