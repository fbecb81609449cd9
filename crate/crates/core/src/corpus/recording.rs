use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{io_err, CorpusError, Modality, Result, CSV_HEADER, FORMAT_TAG, RATE_TOLERANCE};
use crate::numfmt::sig9;
use crate::{SAMPLE_RATE_HZ, WINDOW_LEN};

/// One dual-ear IMU reading. Accelerometer in g (gravity included),
/// gyroscope in deg/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImuSample {
    pub t: f64,
    pub accel_left: [f64; 3],
    pub gyro_left: [f64; 3],
    pub accel_right: [f64; 3],
    pub gyro_right: [f64; 3],
}

impl ImuSample {
    /// The six channels of `modality`, ordered `x_l, y_l, z_l, x_r, y_r, z_r`.
    pub fn channels(&self, modality: Modality) -> [f64; 6] {
        let (l, r) = match modality {
            Modality::Gyroscope => (self.gyro_left, self.gyro_right),
            Modality::Accelerometer => (self.accel_left, self.accel_right),
        };
        [l[0], l[1], l[2], r[0], r[1], r[2]]
    }

    fn values(&self) -> [f64; 12] {
        let (al, gl, ar, gr) = (self.accel_left, self.gyro_left, self.accel_right, self.gyro_right);
        [al[0], al[1], al[2], gl[0], gl[1], gl[2], ar[0], ar[1], ar[2], gr[0], gr[1], gr[2]]
    }

    fn from_values(t: f64, v: &[f64; 12]) -> Self {
        Self {
            t,
            accel_left: [v[0], v[1], v[2]],
            gyro_left: [v[3], v[4], v[5]],
            accel_right: [v[6], v[7], v[8]],
            gyro_right: [v[9], v[10], v[11]],
        }
    }
}

/// A validated time-ordered recording of one participant.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    participant_id: String,
    sample_rate_hz: f64,
    samples: Vec<ImuSample>,
}

impl Recording {
    /// Build a recording, checking finiteness, ordering, spacing and length.
    /// Errors report 1-based sample positions in place of file lines.
    pub fn new(participant_id: impl Into<String>, sample_rate_hz: f64, samples: Vec<ImuSample>) -> Result<Self> {
        check_rate(sample_rate_hz)?;
        for (i, s) in samples.iter().enumerate() {
            if !s.t.is_finite() || s.values().iter().any(|v| !v.is_finite()) {
                return Err(CorpusError::MalformedRow { line: i + 1, reason: "non-finite value".into() });
            }
        }
        check_samples(&samples, sample_rate_hz, |i| i + 1)?;
        Ok(Self { participant_id: participant_id.into(), sample_rate_hz, samples })
    }

    pub fn participant_id(&self) -> &str {
        &self.participant_id
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn samples(&self) -> &[ImuSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Timestamp of the final sample.
    pub fn last_t(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// Nominal end of the recording: one period past the last sample.
    pub fn end_t(&self) -> f64 {
        self.last_t() + 1.0 / self.sample_rate_hz
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if (rate - SAMPLE_RATE_HZ).abs() > 1e-9 {
        return Err(CorpusError::UnsupportedRate(rate));
    }
    Ok(())
}

fn check_samples(samples: &[ImuSample], rate: f64, line_of: impl Fn(usize) -> usize) -> Result<()> {
    let period = 1.0 / rate;
    if let Some(first) = samples.first() {
        if first.t < 0.0 {
            return Err(CorpusError::MalformedRow { line: line_of(0), reason: "negative timestamp".into() });
        }
    }
    for (i, pair) in samples.windows(2).enumerate() {
        let (prev, t) = (pair[0].t, pair[1].t);
        if t <= prev {
            return Err(CorpusError::NonMonotoneTime { line: line_of(i + 1), t, prev });
        }
        let delta = t - prev;
        if (delta - period).abs() > RATE_TOLERANCE * period + 1e-12 {
            return Err(CorpusError::RateViolation { line: line_of(i + 1), delta, expected: period });
        }
    }
    if samples.len() < WINDOW_LEN {
        return Err(CorpusError::TooShort { got: samples.len(), min: WINDOW_LEN });
    }
    Ok(())
}

pub fn load_recording(path: &Path) -> Result<Recording> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_recording(&text)
}

/// Parse the recording CSV. Metadata comment lines (`# key=value, ...`)
/// precede the header; blank lines are ignored.
pub fn parse_recording(text: &str) -> Result<Recording> {
    let mut format = None;
    let mut participant = None;
    let mut rate = None;
    let mut header_seen = false;
    let mut samples = Vec::new();
    let mut lines_of_samples = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if !header_seen {
            if let Some(meta) = line.strip_prefix('#') {
                for kv in meta.split(',') {
                    let Some((k, v)) = kv.split_once('=') else { continue };
                    let v = v.trim().to_string();
                    match k.trim() {
                        "format" => format = Some(v),
                        "participant" => participant = Some(v),
                        "rate_hz" => {
                            let r: f64 = v.parse().map_err(|_| CorpusError::MalformedRow {
                                line: line_no,
                                reason: format!("rate_hz `{v}` is not a number"),
                            })?;
                            rate = Some(r);
                        }
                        _ => {}
                    }
                }
                continue;
            }
            if line != CSV_HEADER {
                return Err(CorpusError::BadHeader(format!("line {line_no}: expected `{CSV_HEADER}`")));
            }
            header_seen = true;
            continue;
        }

        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 13 {
            return Err(CorpusError::MalformedRow {
                line: line_no,
                reason: format!("expected 13 fields, found {}", fields.len()),
            });
        }
        let mut parsed = [0.0f64; 13];
        for (slot, field) in parsed.iter_mut().zip(&fields) {
            let v: f64 = field.trim().parse().map_err(|_| CorpusError::MalformedRow {
                line: line_no,
                reason: format!("`{field}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(CorpusError::MalformedRow { line: line_no, reason: format!("`{field}` is not finite") });
            }
            *slot = v;
        }
        let mut values = [0.0; 12];
        values.copy_from_slice(&parsed[1..]);
        samples.push(ImuSample::from_values(parsed[0], &values));
        lines_of_samples.push(line_no);
    }

    match format {
        Some(f) if f == FORMAT_TAG => {}
        Some(f) => return Err(CorpusError::UnsupportedFormat(f)),
        None => return Err(CorpusError::MissingMetadata("format")),
    }
    let participant = participant.ok_or(CorpusError::MissingMetadata("participant"))?;
    let rate = rate.ok_or(CorpusError::MissingMetadata("rate_hz"))?;
    if !header_seen {
        return Err(CorpusError::BadHeader("no header line".into()));
    }
    check_rate(rate)?;
    check_samples(&samples, rate, |i| lines_of_samples[i])?;
    Ok(Recording { participant_id: participant, sample_rate_hz: rate, samples })
}

/// Serialize in the canonical form: 9 significant digits, `\n` line ends.
pub fn write_recording(rec: &Recording) -> String {
    let mut out = String::with_capacity(rec.samples.len() * 96);
    let _ = writeln!(out, "# format={FORMAT_TAG}");
    let _ = writeln!(out, "# participant={}, rate_hz={}", rec.participant_id, sig9(rec.sample_rate_hz));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &rec.samples {
        out.push_str(&sig9(s.t));
        for v in s.values() {
            out.push(',');
            out.push_str(&sig9(v));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize) -> Vec<ImuSample> {
        (0..n)
            .map(|i| ImuSample {
                t: i as f64 / 5.0,
                accel_left: [0.0, 0.0, 1.0],
                gyro_left: [0.1 * i as f64, 0.0, -0.5],
                accel_right: [0.01, 0.02, 0.98],
                gyro_right: [0.0, 1.5, 0.0],
            })
            .collect()
    }

    fn csv(n: usize) -> String {
        write_recording(&Recording::new("P01", 5.0, grid(n)).unwrap())
    }

    #[test]
    fn uniform_grid_loads() {
        let rec = parse_recording(&csv(150)).unwrap();
        assert_eq!(rec.len(), 150);
        assert_eq!(rec.participant_id(), "P01");
        assert_eq!(rec.samples()[3].channels(Modality::Gyroscope), [0.3, 0.0, -0.5, 0.0, 1.5, 0.0]);
        assert_eq!(rec.samples()[3].channels(Modality::Accelerometer), [0.0, 0.0, 1.0, 0.01, 0.02, 0.98]);
    }

    #[test]
    fn short_row_names_its_line() {
        let mut text = csv(20);
        // header is line 3, data starts at line 4; corrupt the 5th sample (line 8)
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        let fields: Vec<&str> = lines[7].split(',').collect();
        lines[7] = fields[..11].join(",");
        text = lines.join("\n");
        match parse_recording(&text) {
            Err(CorpusError::MalformedRow { line, .. }) => assert_eq!(line, 8),
            other => panic!("expected MalformedRow, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_field_is_malformed() {
        let text = csv(10).replacen("0.2,", "abc,", 1);
        assert!(matches!(parse_recording(&text), Err(CorpusError::MalformedRow { line: 5, .. })));
    }

    #[test]
    fn equal_timestamps_are_rejected() {
        let mut s = grid(10);
        s[4].t = s[3].t;
        assert!(matches!(Recording::new("P", 5.0, s), Err(CorpusError::NonMonotoneTime { line: 5, .. })));
    }

    #[test]
    fn spacing_outside_tolerance_is_rejected() {
        let mut s = grid(10);
        for x in &mut s[5..] {
            x.t += 0.05;
        }
        assert!(matches!(Recording::new("P", 5.0, s.clone()), Err(CorpusError::RateViolation { line: 6, .. })));
        let mut jitter = grid(10);
        jitter[5].t += 0.015;
        assert!(Recording::new("P", 5.0, jitter).is_ok());
    }

    #[test]
    fn fewer_than_eight_samples_is_too_short() {
        assert!(matches!(Recording::new("P", 5.0, grid(7)), Err(CorpusError::TooShort { got: 7, min: 8 })));
        assert!(Recording::new("P", 5.0, grid(8)).is_ok());
    }

    #[test]
    fn metadata_is_required() {
        let text = csv(10);
        let no_format: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_recording(&no_format), Err(CorpusError::MissingMetadata("format"))));
        let wrong = text.replace("bruxkit-v1", "bruxkit-v0");
        assert!(matches!(parse_recording(&wrong), Err(CorpusError::UnsupportedFormat(_))));
        let fast = text.replace("rate_hz=5", "rate_hz=50");
        assert!(matches!(parse_recording(&fast), Err(CorpusError::UnsupportedRate(_))));
        let header = text.replace("gz_r", "gz_x");
        assert!(matches!(parse_recording(&header), Err(CorpusError::BadHeader(_))));
    }

    proptest! {
        #[test]
        fn canonical_text_round_trips(values in proptest::collection::vec(-1e3f64..1e3, 12 * 10)) {
            let samples: Vec<ImuSample> = values
                .chunks(12)
                .enumerate()
                .map(|(i, c)| ImuSample::from_values(i as f64 / 5.0, c.try_into().unwrap()))
                .collect();
            let text = write_recording(&Recording::new("P07", 5.0, samples).unwrap());
            let again = write_recording(&parse_recording(&text).unwrap());
            prop_assert_eq!(text, again);
        }
    }
}
