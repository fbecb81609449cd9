use ndarray::{Array1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::BinaryLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    /// L2 penalty on the weights (not the bias).
    pub l2: f64,
    pub epochs: usize,
    pub step: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self { l2: 1e-3, epochs: 500, step: 0.1 }
    }
}

/// Logistic regression fitted by full-batch gradient descent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Array1<f64>,
    pub bias: f64,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl LogisticModel {
    pub fn fit(x: ArrayView2<f64>, y: &[BinaryLabel], params: &LogisticParams) -> Self {
        let n = x.nrows() as f64;
        let target: Array1<f64> = y.iter().map(|l| if l.is_positive() { 1.0 } else { 0.0 }).collect();
        let mut weights = Array1::<f64>::zeros(x.ncols());
        let mut bias = 0.0;
        for _ in 0..params.epochs {
            let residual = (x.dot(&weights) + bias).mapv(sigmoid) - &target;
            let grad_w = x.t().dot(&residual) / n + &weights * params.l2;
            let grad_b = residual.sum() / n;
            weights.scaled_add(-params.step, &grad_w);
            bias -= params.step * grad_b;
        }
        Self { weights, bias }
    }

    pub fn probability(&self, x: ArrayView2<f64>) -> Array1<f64> {
        (x.dot(&self.weights) + self.bias).mapv(sigmoid)
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Vec<BinaryLabel> {
        self.probability(x)
            .iter()
            .map(|&p| if p > 0.5 { BinaryLabel::Positive } else { BinaryLabel::Silent })
            .collect()
    }
}
