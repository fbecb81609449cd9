mod common;

use bruxkit::corpus::{Event, Modality};
use bruxkit::features::{
    dct_ii_ortho, featurize, fft_in_place, poly_fit_linear, power_spectrum, spectral_centroid, spectral_flatness,
    FEATURE_COUNT,
};
use bruxkit::segment::Window;
use num_complex::Complex64;
use proptest::prelude::*;

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

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

proptest! {
    #[test]
    fn fft_matches_naive_dft(re in prop::collection::vec(-50.0f64..50.0, 16), im in prop::collection::vec(-50.0f64..50.0, 16)) {
        let input: Vec<(f64, f64)> = re.iter().copied().zip(im.iter().copied()).collect();
        let mut buf: Vec<Complex64> = input.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        fft_in_place(&mut buf);
        for (got, want) in buf.iter().zip(common::naive_dft(&input)) {
            prop_assert!((got.re - want.0).abs() < 1e-9 && (got.im - want.1).abs() < 1e-9);
        }
    }

    #[test]
    fn power_spectrum_obeys_parseval(x in prop::collection::vec(-20.0f64..20.0, 8)) {
        let frame = power_spectrum(&x, 5.0);
        prop_assert!(close(&frame.power, &common::naive_power(&x), 1e-9));
        let p = &frame.power;
        let full = p[0] + 2.0 * p[1..4].iter().sum::<f64>() + p[4];
        let energy: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!((full / 8.0 - energy).abs() < 1e-9 * (1.0 + energy));
    }

    #[test]
    fn dct_matches_mirrored_dft(x in prop::collection::vec(-20.0f64..20.0, 1..12)) {
        prop_assert!(close(&dct_ii_ortho(&x), &common::mirrored_dct(&x), 1e-9));
    }

    #[test]
    fn line_fit_matches_normal_equations(y in prop::collection::vec(-20.0f64..20.0, 5)) {
        let x = [0.0, 0.625, 1.25, 1.875, 2.5];
        let (slope, intercept) = poly_fit_linear(&x, &y);
        let (s2, i2) = common::normal_equations_fit(&x, &y);
        prop_assert!((slope - s2).abs() < 1e-9 && (intercept - i2).abs() < 1e-9);
    }

    #[test]
    fn every_window_yields_71_finite_features(v in prop::collection::vec(-500.0f64..500.0, 48)) {
        let samples: [[f64; 6]; 8] = std::array::from_fn(|t| std::array::from_fn(|a| v[t * 6 + a]));
        let fv = featurize(&window(samples));
        prop_assert_eq!(fv.values.len(), FEATURE_COUNT);
        prop_assert!(fv.values.iter().all(|x| x.is_finite()));
    }
}

#[test]
fn constant_window_has_no_spectral_content() {
    let fv = featurize(&window([[1.0, 2.0, 2.0, 0.0, 3.0, 4.0]; 8]));
    // SOVM is 3 + 5 at every step
    assert!(fv.values[48..56].iter().all(|&s| (s - 8.0).abs() < 1e-12));
    assert_eq!(fv.values[bruxkit::features::CENTROID], 0.0);
    assert!(fv.values[65..71].iter().all(|&z| z == 0.0));
}

#[test]
fn white_and_tonal_flatness() {
    let flat = power_spectrum(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 5.0);
    assert!((spectral_flatness(&flat) - 1.0).abs() < 1e-9);
    let tone: Vec<f64> = (0..8).map(|t| (std::f64::consts::PI * t as f64 / 2.0).cos()).collect();
    let frame = power_spectrum(&tone, 5.0);
    assert!(spectral_flatness(&frame) < 1e-6);
    assert!((spectral_centroid(&frame) - 1.25).abs() < 1e-12);
}
