use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::smo::{smo_solve, RbfKernel, SmoConfig};
use super::BinaryLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    /// `None` picks `1 / (d * mean per-feature variance)` of the training rows.
    pub gamma: Option<f64>,
    pub tol: f64,
    pub max_passes: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self { c: 1.0, gamma: None, tol: 1e-3, max_passes: 10 }
    }
}

/// RBF-kernel SVM keeping only the support vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub support: Array2<f64>,
    /// `alpha_i * y_i` per support vector.
    pub coef: Array1<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// `1 / (d * mean column variance)`, falling back to `1 / d` for constant data.
pub fn scale_gamma(x: ArrayView2<f64>) -> f64 {
    let d = x.ncols().max(1) as f64;
    let mean_var = x.var_axis(Axis(0), 0.0).mean().unwrap_or(0.0);
    if mean_var > 0.0 {
        1.0 / (d * mean_var)
    } else {
        1.0 / d
    }
}

impl SvmModel {
    pub fn fit(x: ArrayView2<f64>, y: &[BinaryLabel], params: &SvmParams) -> Self {
        let gamma = params.gamma.unwrap_or_else(|| scale_gamma(x));
        let signs: Vec<f64> = y.iter().map(|l| l.sign()).collect();
        let kernel = RbfKernel::new(x, gamma);
        let config = SmoConfig { c: params.c, tol: params.tol, max_passes: params.max_passes, ..SmoConfig::default() };
        let sol = smo_solve(&kernel, &signs, &config);
        let keep: Vec<usize> = (0..x.nrows()).filter(|&i| sol.alphas[i] > 0.0).collect();
        Self {
            support: x.select(Axis(0), &keep),
            coef: keep.iter().map(|&i| sol.alphas[i] * signs[i]).collect(),
            bias: sol.bias,
            gamma,
            iterations: sol.iterations,
            converged: sol.converged,
        }
    }

    pub fn decision(&self, q: ArrayView2<f64>) -> Array1<f64> {
        let sv_norms: Vec<f64> = self.support.rows().into_iter().map(|r| r.dot(&r)).collect();
        q.rows()
            .into_iter()
            .map(|row| {
                let qn = row.dot(&row);
                let s: f64 = self
                    .support
                    .rows()
                    .into_iter()
                    .zip(&sv_norms)
                    .zip(&self.coef)
                    .map(|((sv, n), c)| c * (-self.gamma * (qn + n - 2.0 * sv.dot(&row)).max(0.0)).exp())
                    .sum();
                s + self.bias
            })
            .collect()
    }

    pub fn predict(&self, q: ArrayView2<f64>) -> Vec<BinaryLabel> {
        self.decision(q)
            .iter()
            .map(|&f| if f > 0.0 { BinaryLabel::Positive } else { BinaryLabel::Silent })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn scale_gamma_of_unit_variance_is_one_over_d() {
        let x = array![[-1.0, 1.0], [1.0, -1.0]];
        assert!((scale_gamma(x.view()) - 0.5).abs() < 1e-12);
        assert!((scale_gamma(array![[2.0, 2.0], [2.0, 2.0]].view()) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_decision_is_silent() {
        let m = SvmModel {
            support: Array2::zeros((0, 1)),
            coef: Array1::zeros(0),
            bias: 0.0,
            gamma: 1.0,
            iterations: 0,
            converged: true,
        };
        assert_eq!(m.predict(array![[3.0]].view()), vec![BinaryLabel::Silent]);
    }
}
