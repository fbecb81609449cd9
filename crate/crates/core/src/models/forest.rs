use ndarray::{ArrayView1, ArrayView2};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, TreeParams};
use super::BinaryLabel;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub bootstrap: bool,
    /// Per-tree settings; `max_features: None` here means floor(sqrt(d)).
    pub tree: TreeParams,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self { n_trees: 100, bootstrap: true, tree: TreeParams::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
}

/// Bootstrap rows of tree `tree` for a forest seeded with `seed`. The same
/// stream then drives that tree's feature sampling.
pub fn bootstrap_indices(seed: u64, tree: usize, n: usize) -> Vec<usize> {
    let mut rng = seed::stream(&[seed, tree as u64]);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

impl RandomForest {
    pub fn fit(x: ArrayView2<f64>, y: &[BinaryLabel], params: &ForestParams, seed: u64) -> Self {
        let n = x.nrows();
        let d = x.ncols();
        let tree_params = TreeParams {
            max_features: Some(params.tree.max_features.unwrap_or_else(|| ((d as f64).sqrt().floor() as usize).max(1))),
            ..params.tree.clone()
        };
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = seed::stream(&[seed, t as u64]);
                let rows: Vec<usize> =
                    if params.bootstrap { (0..n).map(|_| rng.random_range(0..n)).collect() } else { (0..n).collect() };
                DecisionTree::fit_rows(x, y, &rows, &tree_params, &mut rng)
            })
            .collect();
        Self { trees }
    }

    pub fn predict_row(&self, row: ArrayView1<f64>) -> BinaryLabel {
        let positive = self.trees.iter().filter(|t| t.predict_row(row).is_positive()).count();
        BinaryLabel::majority(positive, self.trees.len() - positive)
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Vec<BinaryLabel> {
        x.rows().into_iter().map(|r| self.predict_row(r)).collect()
    }
}
