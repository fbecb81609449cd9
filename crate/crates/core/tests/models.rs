mod common;

use bruxkit::models::smo::kkt_residual;
use bruxkit::models::{
    predict, smo_solve, train, BinaryLabel, DenseKernel, KernelMatrix, ModelError, ModelKind, ModelSpec, RbfKernel,
    SmoConfig, TrainedModel,
};
use common::{blobs, qp_oracle, rng, separable_problem};
use ndarray::Array2;
use proptest::prelude::*;

const KINDS: [ModelKind; 5] = [
    ModelKind::DecisionTree,
    ModelKind::RandomForest,
    ModelKind::Knn,
    ModelKind::LogisticRegression,
    ModelKind::Svm,
];

fn accuracy(truth: &[BinaryLabel], predicted: &[BinaryLabel]) -> f64 {
    truth.iter().zip(predicted).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}

#[test]
fn every_model_fits_separated_blobs() {
    let (x, y) = blobs(200, 6, 6.0, 1);
    let (xt, yt) = blobs(200, 6, 6.0, 2);
    for kind in KINDS {
        let model = train(&ModelSpec::new(kind, 3), x.view(), &y).unwrap();
        let train_acc = accuracy(&y, &predict(&model, x.view()).unwrap());
        let test_acc = accuracy(&yt, &predict(&model, xt.view()).unwrap());
        assert!(train_acc >= 0.99, "{kind}: train {train_acc}");
        assert!(test_acc >= 0.97, "{kind}: test {test_acc}");
    }
}

#[test]
fn training_is_deterministic_per_seed() {
    let (x, y) = blobs(120, 5, 1.5, 4);
    for kind in KINDS {
        let a = train(&ModelSpec::new(kind, 9), x.view(), &y).unwrap();
        let b = train(&ModelSpec::new(kind, 9), x.view(), &y).unwrap();
        assert_eq!(a.to_json(), b.to_json(), "{kind}");
    }
    let a = train(&ModelSpec::new(ModelKind::RandomForest, 1), x.view(), &y).unwrap();
    let b = train(&ModelSpec::new(ModelKind::RandomForest, 2), x.view(), &y).unwrap();
    assert_ne!(a.to_json(), b.to_json());
}

#[test]
fn forest_is_independent_of_thread_count() {
    let (x, y) = blobs(150, 8, 1.0, 5);
    let spec = ModelSpec::new(ModelKind::RandomForest, 11);
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let multi = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = single.install(|| train(&spec, x.view(), &y).unwrap());
    let b = multi.install(|| train(&spec, x.view(), &y).unwrap());
    assert_eq!(a, b);
}

#[test]
fn models_round_trip_through_json() {
    let (x, y) = blobs(80, 4, 2.0, 6);
    for kind in KINDS {
        let model = train(&ModelSpec::new(kind, 0), x.view(), &y).unwrap();
        let back = TrainedModel::from_json(&model.to_json()).unwrap();
        assert_eq!(predict(&model, x.view()).unwrap(), predict(&back, x.view()).unwrap(), "{kind}");
    }
}

#[test]
fn foreign_model_format_is_rejected() {
    let (x, y) = blobs(20, 2, 2.0, 7);
    let json = train(&ModelSpec::new(ModelKind::Knn, 0), x.view(), &y).unwrap().to_json();
    let tampered = json.replace("bruxkit-model-v1", "bruxkit-model-v0");
    assert!(matches!(TrainedModel::from_json(&tampered), Err(ModelError::UnsupportedFormat(f)) if f == "bruxkit-model-v0"));
}

#[test]
fn single_class_training_is_refused_by_discriminative_models() {
    let x = Array2::from_shape_fn((10, 3), |(i, j)| (i * 3 + j) as f64);
    let y = vec![BinaryLabel::Silent; 10];
    for kind in [ModelKind::Svm, ModelKind::LogisticRegression] {
        assert!(matches!(train(&ModelSpec::new(kind, 0), x.view(), &y), Err(ModelError::SingleClassTraining)));
    }
}

#[test]
fn prediction_checks_feature_count() {
    let (x, y) = blobs(20, 3, 2.0, 8);
    let model = train(&ModelSpec::new(ModelKind::LogisticRegression, 0), x.view(), &y).unwrap();
    let wrong = Array2::zeros((2, 4));
    assert!(matches!(predict(&model, wrong.view()), Err(ModelError::DimensionMismatch { expected: 3, got: 4 })));
}

#[test]
fn smo_matches_projected_gradient_oracle() {
    let mut r = rng(42);
    for problem in 0..20 {
        let (points, y) = separable_problem(20, &mut r);
        let x = Array2::from_shape_fn((20, 2), |(i, j)| points[i][j]);
        let kernel = RbfKernel::new(x.view(), 0.5);
        let sol = smo_solve(&kernel, &y, &SmoConfig::default());
        let (_, oracle) = qp_oracle(&kernel, &y, 1.0, 20_000);
        assert!(sol.converged, "{problem}");
        assert!(kkt_residual(&kernel, &y, &sol, 1.0) < 1e-3, "{problem}");
        assert!((sol.dual_objective(&kernel, &y) - oracle).abs() < 1e-4, "{problem}");
    }
}

#[test]
fn smo_solution_is_feasible() {
    let mut r = rng(43);
    let (points, y) = separable_problem(20, &mut r);
    let k = DenseKernel::from_fn(20, |i, j| points[i][0] * points[j][0] + points[i][1] * points[j][1]);
    let c = 0.05;
    let sol = smo_solve(&k, &y, &SmoConfig { c, ..SmoConfig::default() });
    assert!(sol.alphas.iter().all(|&a| (0.0..=c).contains(&a)));
    let balance: f64 = sol.alphas.iter().zip(&y).map(|(a, yi)| a * yi).sum();
    assert!(balance.abs() < 1e-9);
    assert!(k.size() == 20);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn predictions_are_binary_and_one_per_row(seed in 0u64..1000, n in 6usize..40) {
        let (x, y) = blobs(n, 3, 1.0, seed);
        for kind in KINDS {
            let model = train(&ModelSpec::new(kind, seed), x.view(), &y).unwrap();
            prop_assert_eq!(predict(&model, x.view()).unwrap().len(), n);
        }
    }
}
