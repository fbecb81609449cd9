//! Frequency-domain descriptors of one short rectangular frame.
//!
//! Each window is a single frame: an N-point DFT (N = 8 at 5 Hz gives bins
//! every 0.625 Hz up to 2.5 Hz), a 4-filter mel bank, and a 4-coefficient
//! orthonormal DCT-II.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Floor under logs and denominators.
pub const EPSILON: f64 = 1e-10;

/// Mel filters and cepstral coefficients used by [`mfcc_mean`].
pub const MEL_FILTERS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFrame {
    /// Squared DFT magnitudes for bins `0..=N/2`.
    pub power: Vec<f64>,
    /// Bin centre frequencies in Hz.
    pub freqs: Vec<f64>,
}

impl SpectralFrame {
    /// Number of time-domain samples the frame was computed from.
    pub fn frame_len(&self) -> usize {
        2 * (self.power.len() - 1)
    }

    pub fn sample_rate(&self) -> f64 {
        2.0 * self.freqs[self.freqs.len() - 1]
    }
}

/// Iterative radix-2 decimation-in-time FFT. `buf.len()` must be a power of two.
pub fn fft_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "FFT length {n} is not a power of two");
    let bits = n.trailing_zeros();
    if bits == 0 {
        return;
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let step = Complex64::from_polar(1.0, -2.0 * PI / len as f64);
        for chunk in buf.chunks_mut(len) {
            let mut w = Complex64::new(1.0, 0.0);
            let (lo, hi) = chunk.split_at_mut(len / 2);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let odd = *b * w;
                *b = *a - odd;
                *a += odd;
                w *= step;
            }
        }
        len <<= 1;
    }
}

/// One-sided power spectrum of a real frame.
pub fn power_spectrum(signal: &[f64], fs: f64) -> SpectralFrame {
    let n = signal.len();
    let mut buf: Vec<Complex64> = signal.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_in_place(&mut buf);
    let bins = n / 2 + 1;
    SpectralFrame {
        power: buf[..bins].iter().map(|c| c.norm_sqr()).collect(),
        freqs: (0..bins).map(|k| k as f64 * fs / n as f64).collect(),
    }
}

pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular filters with mel-spaced centres spanning `[0, fs/2]`, each
/// normalized so its weights over the frame's bins sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterbank {
    weights: Vec<Vec<f64>>,
}

impl MelFilterbank {
    pub fn new(n_filters: usize, freqs: &[f64]) -> Self {
        let top = hz_to_mel(freqs[freqs.len() - 1]);
        let edges: Vec<f64> = (0..n_filters + 2)
            .map(|i| mel_to_hz(top * i as f64 / (n_filters + 1) as f64))
            .collect();
        let weights = (1..=n_filters)
            .map(|m| {
                let (lo, mid, hi) = (edges[m - 1], edges[m], edges[m + 1]);
                let mut w: Vec<f64> = freqs
                    .iter()
                    .map(|&f| {
                        let rising = (f - lo) / (mid - lo);
                        let falling = (hi - f) / (hi - mid);
                        rising.min(falling).max(0.0)
                    })
                    .collect();
                let total: f64 = w.iter().sum();
                if total > 0.0 {
                    w.iter_mut().for_each(|x| *x /= total);
                }
                w
            })
            .collect();
        Self { weights }
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn energies(&self, power: &[f64]) -> Vec<f64> {
        self.weights.iter().map(|w| w.iter().zip(power).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Orthonormal DCT-II.
pub fn dct_ii_ortho(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    (0..x.len())
        .map(|k| {
            let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            let sum: f64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| v * (PI * k as f64 * (2 * i + 1) as f64 / (2.0 * n)).cos())
                .sum();
            scale * sum
        })
        .collect()
}

/// Cepstral coefficients: DCT-II of the floored log mel energies.
pub fn mfcc(frame: &SpectralFrame, n_filters: usize) -> Vec<f64> {
    let bank = MelFilterbank::new(n_filters, &frame.freqs);
    let logs: Vec<f64> = bank.energies(&frame.power).iter().map(|e| e.max(EPSILON).ln()).collect();
    dct_ii_ortho(&logs)
}

pub fn mfcc_mean(frame: &SpectralFrame) -> f64 {
    let c = mfcc(frame, MEL_FILTERS);
    c.iter().sum::<f64>() / c.len() as f64
}

/// Geometric over arithmetic mean of `power + EPSILON`; in `(0, 1]`.
pub fn spectral_flatness(frame: &SpectralFrame) -> f64 {
    let n = frame.power.len() as f64;
    let shifted = frame.power.iter().map(|p| p + EPSILON);
    let log_mean = shifted.clone().map(f64::ln).sum::<f64>() / n;
    let mean = shifted.sum::<f64>() / n;
    (log_mean.exp() / mean).min(1.0)
}

/// Power-weighted mean frequency; 0 for a frame with no power.
pub fn spectral_centroid(frame: &SpectralFrame) -> f64 {
    let total: f64 = frame.power.iter().sum();
    let weighted: f64 = frame.power.iter().zip(&frame.freqs).map(|(p, f)| p * f).sum();
    weighted / total.max(EPSILON)
}

/// Least-squares line `y = slope * x + intercept`.
pub fn poly_fit_linear(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Mean of the slope and intercept of a line fitted to the magnitude spectrum.
pub fn poly_mean(frame: &SpectralFrame) -> f64 {
    let mags: Vec<f64> = frame.power.iter().map(|p| p.sqrt()).collect();
    let (slope, intercept) = poly_fit_linear(&frame.freqs, &mags);
    (slope + intercept) / 2.0
}
