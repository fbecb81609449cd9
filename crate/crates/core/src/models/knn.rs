use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::BinaryLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self { k: 5 }
    }
}

/// Euclidean k-nearest-neighbour vote over the stored training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub x: Array2<f64>,
    pub y: Vec<BinaryLabel>,
}

impl KnnModel {
    pub fn fit(x: Array2<f64>, y: &[BinaryLabel], params: &KnnParams) -> Self {
        Self { k: params.k.max(1), x, y: y.to_vec() }
    }

    pub fn predict(&self, q: ArrayView2<f64>) -> Vec<BinaryLabel> {
        let k = self.k.min(self.y.len());
        let mut dist: Vec<(f64, usize)> = Vec::with_capacity(self.y.len());
        q.rows()
            .into_iter()
            .map(|row| {
                dist.clear();
                dist.extend(self.x.rows().into_iter().enumerate().map(|(i, r)| {
                    let d: f64 = r.iter().zip(row.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                    (d, i)
                }));
                let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
                if k < dist.len() {
                    dist.select_nth_unstable_by(k - 1, by_distance);
                }
                let positive = dist[..k].iter().filter(|(_, i)| self.y[*i].is_positive()).count();
                BinaryLabel::majority(positive, k - positive)
            })
            .collect()
    }
}
