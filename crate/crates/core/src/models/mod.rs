//! The five classifiers, each trained on per-fold standardized features.
//!
//! Every model predicts a [`BinaryLabel`]; all ties (leaf counts, votes,
//! zero decision values, p = 0.5) resolve to [`BinaryLabel::Silent`].

pub mod forest;
pub mod knn;
pub mod logistic;
pub mod smo;
pub mod standardize;
pub mod svm;
pub mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use forest::{bootstrap_indices, ForestParams, RandomForest};
pub use knn::{KnnModel, KnnParams};
pub use logistic::{LogisticModel, LogisticParams};
pub use smo::{smo_solve, DenseKernel, KernelMatrix, RbfKernel, SmoConfig, SmoSolution};
pub use standardize::Standardizer;
pub use svm::{SvmModel, SvmParams};
pub use tree::{DecisionTree, TreeParams};

/// Container tag of serialized models.
pub const MODEL_FORMAT: &str = "bruxkit-model-v1";

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training labels contain a single class")]
    SingleClassTraining,
    #[error("expected {expected} feature columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{rows} rows but {labels} labels")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("training needs at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("invalid hyperparameter {key}={value}: {reason}")]
    InvalidHyperparameter { key: String, value: String, reason: String },
    #[error("unsupported model format `{0}` (expected {MODEL_FORMAT})")]
    UnsupportedFormat(String),
    #[error("model JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Binary target: the task's positive event versus silence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryLabel {
    Silent,
    Positive,
}

impl BinaryLabel {
    pub fn sign(self) -> f64 {
        match self {
            BinaryLabel::Positive => 1.0,
            BinaryLabel::Silent => -1.0,
        }
    }

    pub fn is_positive(self) -> bool {
        self == BinaryLabel::Positive
    }

    /// Majority of two counts; ties are silent.
    pub fn majority(positive: usize, silent: usize) -> Self {
        if positive > silent {
            BinaryLabel::Positive
        } else {
            BinaryLabel::Silent
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    DecisionTree,
    Knn,
    LogisticRegression,
    RandomForest,
    Svm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] =
        [ModelKind::DecisionTree, ModelKind::Knn, ModelKind::LogisticRegression, ModelKind::RandomForest, ModelKind::Svm];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::DecisionTree => "decision_tree",
            ModelKind::Knn => "knn",
            ModelKind::LogisticRegression => "logistic_regression",
            ModelKind::RandomForest => "random_forest",
            ModelKind::Svm => "svm",
        }
    }

    /// Whether training refuses a single-class label vector.
    pub fn needs_both_classes(self) -> bool {
        self != ModelKind::Knn
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "decision_tree" | "dt" => Ok(ModelKind::DecisionTree),
            "knn" | "k_nn" => Ok(ModelKind::Knn),
            "logistic_regression" | "lr" => Ok(ModelKind::LogisticRegression),
            "random_forest" | "rf" => Ok(ModelKind::RandomForest),
            "svm" => Ok(ModelKind::Svm),
            _ => Err(format!("unknown model kind `{s}`")),
        }
    }
}

/// Kind-specific hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hyperparameters {
    DecisionTree(TreeParams),
    Knn(KnnParams),
    LogisticRegression(LogisticParams),
    RandomForest(ForestParams),
    Svm(SvmParams),
}

impl Hyperparameters {
    pub fn defaults(kind: ModelKind) -> Self {
        match kind {
            ModelKind::DecisionTree => Hyperparameters::DecisionTree(TreeParams::default()),
            ModelKind::Knn => Hyperparameters::Knn(KnnParams::default()),
            ModelKind::LogisticRegression => Hyperparameters::LogisticRegression(LogisticParams::default()),
            ModelKind::RandomForest => Hyperparameters::RandomForest(ForestParams::default()),
            ModelKind::Svm => Hyperparameters::Svm(SvmParams::default()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Hyperparameters::DecisionTree(_) => ModelKind::DecisionTree,
            Hyperparameters::Knn(_) => ModelKind::Knn,
            Hyperparameters::LogisticRegression(_) => ModelKind::LogisticRegression,
            Hyperparameters::RandomForest(_) => ModelKind::RandomForest,
            Hyperparameters::Svm(_) => ModelKind::Svm,
        }
    }

    /// Override one hyperparameter from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ModelError> {
        let bad = |reason: &str| ModelError::InvalidHyperparameter {
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.to_string(),
        };
        let usize_of = |v: &str| v.parse::<usize>().map_err(|_| bad("expected a non-negative integer"));
        let opt_usize_of = |v: &str| match v {
            "none" | "unlimited" | "all" => Ok(None),
            _ => usize_of(v).map(Some),
        };
        let f64_of = |v: &str| match v.parse::<f64>() {
            Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
            _ => Err(bad("expected a positive number")),
        };
        match (self, key) {
            (Hyperparameters::DecisionTree(p), "max_depth") => p.max_depth = opt_usize_of(value)?,
            (Hyperparameters::DecisionTree(p), "min_samples_leaf") => p.min_samples_leaf = usize_of(value)?.max(1),
            (Hyperparameters::DecisionTree(p), "max_features") => p.max_features = opt_usize_of(value)?,
            (Hyperparameters::Knn(p), "k") => p.k = usize_of(value)?.max(1),
            (Hyperparameters::LogisticRegression(p), "l2") => p.l2 = value.parse().map_err(|_| bad("expected a number"))?,
            (Hyperparameters::LogisticRegression(p), "epochs") => p.epochs = usize_of(value)?,
            (Hyperparameters::LogisticRegression(p), "step") => p.step = f64_of(value)?,
            (Hyperparameters::RandomForest(p), "n_trees") => p.n_trees = usize_of(value)?.max(1),
            (Hyperparameters::RandomForest(p), "max_depth") => p.tree.max_depth = opt_usize_of(value)?,
            (Hyperparameters::RandomForest(p), "min_samples_leaf") => p.tree.min_samples_leaf = usize_of(value)?.max(1),
            (Hyperparameters::RandomForest(p), "max_features") => p.tree.max_features = opt_usize_of(value)?,
            (Hyperparameters::RandomForest(p), "bootstrap") => {
                p.bootstrap = value.parse().map_err(|_| bad("expected true or false"))?
            }
            (Hyperparameters::Svm(p), "c") => p.c = f64_of(value)?,
            (Hyperparameters::Svm(p), "gamma") => {
                p.gamma = if value == "scale" { None } else { Some(f64_of(value)?) }
            }
            (Hyperparameters::Svm(p), "tol") => p.tol = f64_of(value)?,
            (Hyperparameters::Svm(p), "max_passes") => p.max_passes = usize_of(value)?.max(1),
            _ => return Err(bad("not a hyperparameter of this model kind")),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub params: Hyperparameters,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, seed: u64) -> Self {
        Self { params: Hyperparameters::defaults(kind), seed }
    }

    pub fn kind(&self) -> ModelKind {
        self.params.kind()
    }

    /// Apply `key=value` overrides in order.
    pub fn with_overrides<'a>(
        mut self,
        overrides: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, ModelError> {
        for (k, v) in overrides {
            self.params.set(k, v)?;
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Parameters {
    DecisionTree(DecisionTree),
    Knn(KnnModel),
    LogisticRegression(LogisticModel),
    RandomForest(RandomForest),
    Svm(SvmModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format: String,
    pub spec: ModelSpec,
    pub standardizer: Standardizer,
    pub parameters: Parameters,
}

impl TrainedModel {
    pub fn n_features(&self) -> usize {
        self.standardizer.n_features()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Parse a model file; any other container version is rejected.
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        #[derive(Deserialize)]
        struct Tag {
            format: String,
        }
        let tag: Tag = serde_json::from_str(text)?;
        if tag.format != MODEL_FORMAT {
            return Err(ModelError::UnsupportedFormat(tag.format));
        }
        Ok(serde_json::from_str(text)?)
    }

    /// Notes worth surfacing next to results, such as solver non-convergence.
    pub fn diagnostics(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        if let Parameters::Svm(m) = &self.parameters {
            out.insert("smo_iterations".into(), m.iterations.to_string());
            out.insert("smo_converged".into(), m.converged.to_string());
            out.insert("support_vectors".into(), m.support.nrows().to_string());
        }
        out
    }
}

fn check_shapes(x: ArrayView2<f64>, y: &[BinaryLabel]) -> Result<(), ModelError> {
    if x.nrows() == 0 {
        return Err(ModelError::EmptyTrainingSet);
    }
    if x.nrows() != y.len() {
        return Err(ModelError::LengthMismatch { rows: x.nrows(), labels: y.len() });
    }
    if x.nrows() < 2 {
        return Err(ModelError::TooFewRows(x.nrows()));
    }
    Ok(())
}

/// Fit a standardizer on `x`, then the model on the standardized rows.
pub fn train(spec: &ModelSpec, x: ArrayView2<f64>, y: &[BinaryLabel]) -> Result<TrainedModel, ModelError> {
    check_shapes(x, y)?;
    let positives = y.iter().filter(|l| l.is_positive()).count();
    if spec.kind().needs_both_classes() && (positives == 0 || positives == y.len()) {
        return Err(ModelError::SingleClassTraining);
    }
    let standardizer = Standardizer::fit(x)?;
    let z = standardizer.transform(x)?;
    let parameters = match &spec.params {
        Hyperparameters::DecisionTree(p) => Parameters::DecisionTree(DecisionTree::fit(z.view(), y, p, spec.seed)),
        Hyperparameters::Knn(p) => Parameters::Knn(KnnModel::fit(z, y, p)),
        Hyperparameters::LogisticRegression(p) => Parameters::LogisticRegression(LogisticModel::fit(z.view(), y, p)),
        Hyperparameters::RandomForest(p) => Parameters::RandomForest(RandomForest::fit(z.view(), y, p, spec.seed)),
        Hyperparameters::Svm(p) => Parameters::Svm(SvmModel::fit(z.view(), y, p)),
    };
    Ok(TrainedModel { format: MODEL_FORMAT.to_string(), spec: spec.clone(), standardizer, parameters })
}

pub fn predict(model: &TrainedModel, x: ArrayView2<f64>) -> Result<Vec<BinaryLabel>, ModelError> {
    let z = model.standardizer.transform(x)?;
    let z = z.view();
    Ok(match &model.parameters {
        Parameters::DecisionTree(t) => z.rows().into_iter().map(|r| t.predict_row(r)).collect(),
        Parameters::Knn(m) => m.predict(z),
        Parameters::LogisticRegression(m) => m.predict(z),
        Parameters::RandomForest(m) => m.predict(z),
        Parameters::Svm(m) => m.predict(z),
    })
}

/// Stack equal-length rows into a matrix.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Array2<f64>, ModelError> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut flat = Vec::with_capacity(rows.len() * cols);
    for r in rows {
        if r.len() != cols {
            return Err(ModelError::DimensionMismatch { expected: cols, got: r.len() });
        }
        flat.extend_from_slice(r);
    }
    Ok(Array2::from_shape_vec((rows.len(), cols), flat).expect("shape matches"))
}
