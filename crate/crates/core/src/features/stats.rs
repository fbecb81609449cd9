//! Time-domain descriptors: SOVM, amplitude statistics, zero-crossing rate.

use crate::segment::Window;
use crate::{AXES, WINDOW_LEN};

/// Sum of the left and right per-ear vector magnitudes at each time step.
pub fn sovm(window: &Window) -> [f64; WINDOW_LEN] {
    std::array::from_fn(|t| {
        let s = &window.samples[t];
        let left = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
        let right = (s[3] * s[3] + s[4] * s[4] + s[5] * s[5]).sqrt();
        right + left
    })
}

/// `(max, min, mean, population std, mean absolute deviation)`.
pub fn amplitude_stats(s: &[f64]) -> [f64; 5] {
    assert!(!s.is_empty());
    let n = s.len() as f64;
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = s.iter().sum::<f64>() / n;
    let var = s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let mad = s.iter().map(|x| (x - mean).abs()).sum::<f64>() / n;
    [max, min, mean, var.sqrt(), mad]
}

/// Fraction of consecutive pairs whose mean-centred values change sign.
/// Exact zeros never count as a crossing.
pub fn zcr(signal: &[f64]) -> f64 {
    if signal.len() < 2 {
        return 0.0;
    }
    let mean = signal.iter().sum::<f64>() / signal.len() as f64;
    let crossings = signal
        .windows(2)
        .filter(|p| {
            let (a, b) = (p[0] - mean, p[1] - mean);
            (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)
        })
        .count();
    crossings as f64 / (signal.len() - 1) as f64
}

pub fn zcr_per_axis(window: &Window) -> [f64; AXES] {
    std::array::from_fn(|axis| zcr(&window.axis(axis)))
}
