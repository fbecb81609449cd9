use bruxkit::corpus::{validate_pair, Activity, Event, Modality};
use bruxkit::features::{featurize, sovm, CENTROID};
use bruxkit::segment::{segment, LabelPolicy};
use bruxkit::synth::{
    generate_corpus, generate_participant, synthesize, CorpusOptions, ParticipantProfile, ProtocolScript, ScriptKind,
    ScriptSegment, SynthError,
};
use bruxkit::SAMPLE_RATE_HZ;

fn one_segment(samples: usize, event: Event, activity: Activity) -> ProtocolScript {
    ProtocolScript { segments: vec![ScriptSegment { samples, event, activity, annotated: true, key: 1 }] }
}

#[test]
fn noiseless_still_session_is_the_static_baseline() {
    let profile = ParticipantProfile::draw(0, 1).noiseless();
    let (rec, _) = generate_participant(&profile, &one_segment(60, Event::Silent, Activity::None));
    for s in rec.samples() {
        assert_eq!(s.accel_left, [0.0, 0.0, 1.0]);
        assert_eq!(s.accel_right, [0.0, 0.0, 1.0]);
        assert_eq!(s.gyro_left, [0.0; 3]);
        assert_eq!(s.gyro_right, [0.0; 3]);
    }
}

#[test]
fn noiseless_grinding_sovm_follows_the_oscillator() {
    for index in 0..6 {
        let profile = ParticipantProfile::draw(index, 11).noiseless();
        let (rec, track) = generate_participant(&profile, &one_segment(200, Event::Grinding, Activity::None));
        let windows = segment(&rec, &track, Modality::Gyroscope, LabelPolicy::DominantEvent).unwrap();
        // the magnitude on each ear is amp * gain * (offset + sin), so the
        // SOVM minus its minimum over a long span is a pure sinusoid whose
        // period can be read off the zero crossings of its mean-removed form
        let all: Vec<f64> = windows.iter().step_by(2).flat_map(sovm).collect();
        let mean = all.iter().sum::<f64>() / all.len() as f64;
        let crossings = all.windows(2).filter(|p| (p[0] - mean) * (p[1] - mean) < 0.0).count();
        let seconds = all.len() as f64 / SAMPLE_RATE_HZ;
        let est = crossings as f64 / (2.0 * seconds);
        assert!((est - profile.grind_freq).abs() < 0.1, "{index}: {est} vs {}", profile.grind_freq);

        let centroids: Vec<f64> = windows.iter().map(|w| featurize(w).values[CENTROID]).collect();
        let mean_centroid = centroids.iter().sum::<f64>() / centroids.len() as f64;
        assert!(
            (mean_centroid - profile.grind_freq).abs() <= 0.3125,
            "{index}: centroid {mean_centroid} vs {}",
            profile.grind_freq
        );
    }
}

#[test]
fn clenching_is_an_onset_transient() {
    let profile = ParticipantProfile::draw(2, 5).noiseless();
    let (rec, _) = generate_participant(&profile, &one_segment(30, Event::Clenching, Activity::None));
    let magnitude = |k: usize| rec.samples()[k].gyro_left.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(magnitude(0) > 0.0 && magnitude(1) > 0.0);
    assert!((2..30).all(|k| magnitude(k) == 0.0));
}

#[test]
fn standard_session_is_about_25_minutes_and_validates() {
    let opts = CorpusOptions { participants: 3, ..CorpusOptions::default() };
    let corpus = synthesize(&opts).unwrap();
    for (session, profile) in corpus.sessions().iter().zip(opts.profiles()) {
        let minutes = session.recording.len() as f64 / SAMPLE_RATE_HZ / 60.0;
        assert!((24.0..=26.0).contains(&minutes), "{minutes}");
        let report = validate_pair(&session.recording, &session.track);
        assert!(report.is_clean(), "{:?}", report.issues);
        let script = ProtocolScript::standard(profile.seed);
        for event in [Event::Grinding, Event::Clenching] {
            assert!((report.coverage[&event] - script.event_seconds(event)).abs() < 1e-9);
        }
        // experiments 1, 2, 6 hold grinding six times each
        let grinding_holds = session.track.intervals().iter().filter(|i| i.event == Event::Grinding).count();
        assert_eq!(grinding_holds, 18);
    }
}

#[test]
fn gyroscope_separates_grinding_better_than_accelerometer() {
    let corpus = synthesize(&CorpusOptions { participants: 4, ..CorpusOptions::default() }).unwrap();
    let separation = |modality| {
        let (mut grind, mut silent) = (Vec::new(), Vec::new());
        for s in corpus.sessions() {
            for w in segment(&s.recording, &s.track, modality, LabelPolicy::DominantEvent).unwrap() {
                if w.activity_context != Some(Activity::None) {
                    continue;
                }
                let v = sovm(&w);
                let m = v.iter().sum::<f64>() / 8.0;
                let sd = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / 8.0).sqrt();
                match w.label {
                    Event::Grinding => grind.push(sd),
                    Event::Silent => silent.push(sd),
                    Event::Clenching => {}
                }
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        mean(&grind) / mean(&silent)
    };
    let (gyro, accel) = (separation(Modality::Gyroscope), separation(Modality::Accelerometer));
    assert!(gyro > accel, "gyro {gyro} accel {accel}");
}

#[test]
fn corpus_files_are_deterministic_and_seed_dependent() {
    let opts = CorpusOptions { participants: 2, script: ScriptKind::Minimal, ..CorpusOptions::default() };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ma = generate_corpus(&opts, a.path()).unwrap();
    let mb = generate_corpus(&opts, b.path()).unwrap();
    assert_eq!(ma, mb);
    for name in ["P01.csv", "P01.json", "P02.csv", "P02.json", "manifest.json"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap());
    }
    let other = generate_corpus(&CorpusOptions { seed: 8, ..opts }, b.path()).unwrap();
    assert_ne!(ma.participants[0].sha256, other.participants[0].sha256);
}

#[test]
fn loaded_corpus_matches_in_memory_corpus() {
    let opts = CorpusOptions { participants: 2, script: ScriptKind::Minimal, ..CorpusOptions::default() };
    let dir = tempfile::tempdir().unwrap();
    generate_corpus(&opts, dir.path()).unwrap();
    let loaded = bruxkit::corpus::Corpus::load_dir(dir.path()).unwrap();
    assert_eq!(loaded, synthesize(&opts).unwrap());
}

#[test]
fn fewer_than_two_participants_is_rejected() {
    let opts = CorpusOptions { participants: 1, ..CorpusOptions::default() };
    assert!(matches!(synthesize(&opts), Err(SynthError::TooFewParticipants(1))));
}

#[test]
fn segment_noise_does_not_depend_on_neighbours() {
    let profile = ParticipantProfile::draw(0, 3);
    let a = ScriptSegment { samples: 40, event: Event::Silent, activity: Activity::None, annotated: false, key: 10 };
    let b = ScriptSegment { key: 20, ..a };
    let (alone, _) = generate_participant(&profile, &ProtocolScript { segments: vec![b] });
    let (after, _) = generate_participant(&profile, &ProtocolScript { segments: vec![a, b] });
    for (x, y) in alone.samples().iter().zip(&after.samples()[40..]) {
        assert_eq!(x.gyro_left, y.gyro_left);
        assert_eq!(x.accel_right, y.accel_right);
    }
}
