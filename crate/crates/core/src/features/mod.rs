//! The 71-value window descriptor.
//!
//! Layout of [`FeatureVector::values`]:
//!
//! | index    | content                                                    |
//! |----------|------------------------------------------------------------|
//! | 0..=47   | raw samples, time-major, axes `x_l y_l z_l x_r y_r z_r`    |
//! | 48..=55  | SOVM per time step                                         |
//! | 56       | mean MFCC of the SOVM                                      |
//! | 57       | spectral flatness of the SOVM                              |
//! | 58       | spectral centroid of the SOVM (Hz)                         |
//! | 59       | mean of the degree-1 poly-fit coefficients                 |
//! | 60..=64  | SOVM max, min, mean, population std, mean absolute dev.    |
//! | 65..=70  | zero-crossing rate per axis                                |
//!
//! The spectral block (56..=59) is computed on the SOVM with its window
//! mean removed; the mean itself is already feature 62.

pub mod spectral;
pub mod stats;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{Event, Modality};
use crate::numfmt::sig9;
use crate::segment::Window;
use crate::{SAMPLE_RATE_HZ, WINDOW_LEN};

pub use spectral::{
    dct_ii_ortho, fft_in_place, mfcc, mfcc_mean, poly_fit_linear, poly_mean, power_spectrum, spectral_centroid,
    spectral_flatness, MelFilterbank, SpectralFrame, EPSILON,
};
pub use stats::{amplitude_stats, sovm, zcr, zcr_per_axis};

/// Total descriptor length.
pub const FEATURE_COUNT: usize = 71;

pub const RAW_RANGE: std::ops::Range<usize> = 0..48;
pub const SOVM_RANGE: std::ops::Range<usize> = 48..56;
pub const MFCC_MEAN: usize = 56;
pub const FLATNESS: usize = 57;
pub const CENTROID: usize = 58;
pub const POLY_MEAN: usize = 59;
pub const STATS_RANGE: std::ops::Range<usize> = 60..65;
pub const ZCR_RANGE: std::ops::Range<usize> = 65..71;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub label: Event,
    pub participant_id: String,
    pub modality: Modality,
}

pub fn featurize(window: &Window) -> FeatureVector {
    let mut values = Vec::with_capacity(FEATURE_COUNT);
    for step in &window.samples {
        values.extend_from_slice(step);
    }

    let magnitudes = sovm(window);
    values.extend_from_slice(&magnitudes);

    let mean = magnitudes.iter().sum::<f64>() / WINDOW_LEN as f64;
    let centered: Vec<f64> = magnitudes.iter().map(|m| m - mean).collect();
    let frame = power_spectrum(&centered, SAMPLE_RATE_HZ);
    values.push(mfcc_mean(&frame));
    values.push(spectral_flatness(&frame));
    values.push(spectral_centroid(&frame));
    values.push(poly_mean(&frame));

    values.extend_from_slice(&amplitude_stats(&magnitudes));
    values.extend_from_slice(&zcr_per_axis(window));
    debug_assert_eq!(values.len(), FEATURE_COUNT);

    FeatureVector { values, label: window.label, participant_id: window.participant_id.clone(), modality: window.modality }
}

/// Header of the feature matrix dump.
pub fn features_csv_header() -> String {
    let mut h = String::from("participant,modality,label");
    for i in 0..FEATURE_COUNT {
        let _ = write!(h, ",f{i}");
    }
    h
}

pub fn features_csv_row(fv: &FeatureVector) -> String {
    let mut row = format!("{},{},{}", fv.participant_id, fv.modality, fv.label);
    for v in &fv.values {
        row.push(',');
        row.push_str(&sig9(*v));
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(samples: [[f64; 6]; 8]) -> Window {
        Window {
            participant_id: "P01".into(),
            modality: Modality::Gyroscope,
            start_index: 0,
            samples,
            label: Event::Silent,
            activity_context: None,
            block: None,
        }
    }

    #[test]
    fn zero_window_layout() {
        let fv = featurize(&window([[0.0; 6]; 8]));
        assert_eq!(fv.values.len(), FEATURE_COUNT);
        assert!(fv.values[RAW_RANGE].iter().all(|&v| v == 0.0));
        assert!(fv.values[SOVM_RANGE].iter().all(|&v| v == 0.0));
        assert!(fv.values[STATS_RANGE].iter().all(|&v| v == 0.0));
        assert!(fv.values[ZCR_RANGE].iter().all(|&v| v == 0.0));
        // log-floored cepstrum: DC coefficient 2 ln(eps), mean ln(eps)/2
        assert!((fv.values[MFCC_MEAN] - EPSILON.ln() / 2.0).abs() < 1e-12);
        assert!((fv.values[FLATNESS] - 1.0).abs() < 1e-12);
        assert_eq!(fv.values[CENTROID], 0.0);
        assert_eq!(fv.values[POLY_MEAN], 0.0);
    }

    #[test]
    fn raw_block_is_time_major() {
        let mut s = [[0.0; 6]; 8];
        for (t, row) in s.iter_mut().enumerate() {
            for (a, v) in row.iter_mut().enumerate() {
                *v = (10 * t + a) as f64;
            }
        }
        let fv = featurize(&window(s));
        for (i, v) in fv.values[RAW_RANGE].iter().enumerate() {
            assert_eq!(*v, (10 * (i / 6) + i % 6) as f64);
        }
    }

    #[test]
    fn identical_windows_give_identical_vectors() {
        let mut s = [[0.0; 6]; 8];
        for (t, row) in s.iter_mut().enumerate() {
            row[0] = (t as f64 * 0.7).sin();
            row[4] = (t as f64 * 1.3).cos() * 3.0;
        }
        let a = featurize(&window(s));
        let b = featurize(&window(s));
        assert_eq!(features_csv_row(&a), features_csv_row(&b));
        assert_eq!(features_csv_header().split(',').count(), 74);
        assert_eq!(features_csv_row(&a).split(',').count(), 74);
    }
}
