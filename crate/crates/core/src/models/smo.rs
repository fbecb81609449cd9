//! Sequential minimal optimization for the soft-margin SVM dual
//!
//! ```text
//! max  sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij
//! s.t. 0 <= a_i <= C,  sum(a_i y_i) = 0
//! ```
//!
//! Working pairs are chosen with second-order (maximal-gain) selection,
//! which is deterministic; the iteration stops once the maximal KKT
//! violation gap drops below `tol`.

use std::collections::HashMap;
use std::rc::Rc;

use ndarray::ArrayView2;

const TAU: f64 = 1e-12;

/// Read access to a symmetric positive semi-definite kernel matrix.
pub trait KernelMatrix {
    fn size(&self) -> usize;
    fn entry(&self, i: usize, j: usize) -> f64;
    fn row(&self, i: usize, out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.entry(i, j);
        }
    }
}

/// Precomputed row-major kernel matrix.
#[derive(Debug, Clone)]
pub struct DenseKernel {
    n: usize,
    data: Vec<f64>,
}

impl DenseKernel {
    pub fn new(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "kernel matrix must be n x n");
        Self { n, data }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self { n, data }
    }
}

impl KernelMatrix for DenseKernel {
    fn size(&self) -> usize {
        self.n
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn row(&self, i: usize, out: &mut [f64]) {
        out.copy_from_slice(&self.data[i * self.n..(i + 1) * self.n]);
    }
}

/// Gaussian kernel `exp(-gamma * |x_i - x_j|^2)` evaluated on demand.
pub struct RbfKernel<'a> {
    x: ArrayView2<'a, f64>,
    sq_norms: Vec<f64>,
    gamma: f64,
}

impl<'a> RbfKernel<'a> {
    pub fn new(x: ArrayView2<'a, f64>, gamma: f64) -> Self {
        let sq_norms = x.rows().into_iter().map(|r| r.dot(&r)).collect();
        Self { x, sq_norms, gamma }
    }
}

impl KernelMatrix for RbfKernel<'_> {
    fn size(&self) -> usize {
        self.x.nrows()
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 1.0;
        }
        let d = (self.sq_norms[i] + self.sq_norms[j] - 2.0 * self.x.row(i).dot(&self.x.row(j))).max(0.0);
        (-self.gamma * d).exp()
    }

    fn row(&self, i: usize, out: &mut [f64]) {
        let xi = self.x.row(i);
        for (j, o) in out.iter_mut().enumerate() {
            *o = if i == j {
                1.0
            } else {
                let d = (self.sq_norms[i] + self.sq_norms[j] - 2.0 * xi.dot(&self.x.row(j))).max(0.0);
                (-self.gamma * d).exp()
            };
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoConfig {
    pub c: f64,
    pub tol: f64,
    /// Iteration budget as a multiple of `n` sweeps of `n` pair updates.
    pub max_passes: usize,
    /// Byte budget for cached kernel rows.
    pub cache_bytes: usize,
}

impl Default for SmoConfig {
    fn default() -> Self {
        Self { c: 1.0, tol: 1e-3, max_passes: 10, cache_bytes: 256 << 20 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoSolution {
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Final maximal violating-pair gap.
    pub gap: f64,
}

impl SmoSolution {
    /// Dual objective `sum(a) - 1/2 a^T Q a`.
    pub fn dual_objective(&self, kernel: &dyn KernelMatrix, y: &[f64]) -> f64 {
        dual_objective(kernel, y, &self.alphas)
    }
}

pub fn dual_objective(kernel: &dyn KernelMatrix, y: &[f64], alphas: &[f64]) -> f64 {
    let n = alphas.len();
    let mut quad = 0.0;
    for i in 0..n {
        if alphas[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            quad += alphas[i] * alphas[j] * y[i] * y[j] * kernel.entry(i, j);
        }
    }
    alphas.iter().sum::<f64>() - 0.5 * quad
}

struct RowCache<'k> {
    kernel: &'k dyn KernelMatrix,
    rows: HashMap<usize, (Rc<[f64]>, u64)>,
    capacity: usize,
    clock: u64,
}

impl<'k> RowCache<'k> {
    fn new(kernel: &'k dyn KernelMatrix, cache_bytes: usize) -> Self {
        let row_bytes = kernel.size().max(1) * std::mem::size_of::<f64>();
        Self { kernel, rows: HashMap::new(), capacity: (cache_bytes / row_bytes).max(2), clock: 0 }
    }

    fn get(&mut self, i: usize) -> Rc<[f64]> {
        self.clock += 1;
        if let Some((row, stamp)) = self.rows.get_mut(&i) {
            *stamp = self.clock;
            return Rc::clone(row);
        }
        if self.rows.len() >= self.capacity {
            let oldest = self.rows.iter().min_by_key(|(_, (_, s))| *s).map(|(&k, _)| k).expect("non-empty cache");
            self.rows.remove(&oldest);
        }
        let mut buf = vec![0.0; self.kernel.size()];
        self.kernel.row(i, &mut buf);
        let row: Rc<[f64]> = buf.into();
        self.rows.insert(i, (Rc::clone(&row), self.clock));
        row
    }
}

/// Solve the dual for labels `y` in {-1, +1}. Non-convergence within the
/// iteration budget is reported through [`SmoSolution::converged`]; the
/// returned multipliers stay feasible.
pub fn smo_solve(kernel: &dyn KernelMatrix, y: &[f64], config: &SmoConfig) -> SmoSolution {
    let n = kernel.size();
    assert_eq!(y.len(), n, "one label per kernel row");
    let c = config.c;
    let max_iter = (config.max_passes.saturating_mul(n).saturating_mul(n)).clamp(1000, 100_000_000);
    let diag: Vec<f64> = (0..n).map(|i| kernel.entry(i, i)).collect();
    let mut cache = RowCache::new(kernel, config.cache_bytes);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut iterations = 0;
    let mut converged = false;
    let mut gap = f64::INFINITY;

    let in_up = |a: f64, yt: f64| if yt > 0.0 { a < c } else { a > 0.0 };
    let in_low = |a: f64, yt: f64| if yt > 0.0 { a > 0.0 } else { a < c };

    while iterations < max_iter {
        // i: maximal violator in I_up by -y G
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if in_up(alpha[t], y[t]) {
                let v = -y[t] * grad[t];
                if v >= gmax {
                    gmax = v;
                    i_sel = Some(t);
                }
            }
        }
        let Some(i) = i_sel else {
            converged = true;
            gap = 0.0;
            break;
        };
        let ki = cache.get(i);

        // j: largest second-order gain in I_low
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut obj_min = f64::INFINITY;
        for t in 0..n {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            let v = y[t] * grad[t];
            if v >= gmax2 {
                gmax2 = v;
            }
            let grad_diff = gmax + v;
            if grad_diff > 0.0 {
                let quad = diag[i] + diag[t] - 2.0 * ki[t];
                let quad = if quad > 0.0 { quad } else { TAU };
                let obj = -(grad_diff * grad_diff) / quad;
                if obj <= obj_min {
                    obj_min = obj;
                    j_sel = Some(t);
                }
            }
        }
        gap = gmax + gmax2;
        let Some(j) = j_sel.filter(|_| gap >= config.tol) else {
            converged = gap < config.tol;
            break;
        };
        let kj = cache.get(j);
        iterations += 1;

        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        let kij = ki[j];
        let quad = {
            let q = diag[i] + diag[j] - 2.0 * kij;
            if q > 0.0 { q } else { TAU }
        };
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (dai, daj) = (alpha[i] - old_ai, alpha[j] - old_aj);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * ki[t] * dai + y[j] * kj[t] * daj);
        }
    }

    let bias = -rho(&alpha, &grad, y, c);
    SmoSolution { alphas: alpha, bias, iterations, converged, gap }
}

fn rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    }
}

/// Largest violation of the KKT conditions `y_i f(x_i) >= 1` (a = 0),
/// `= 1` (0 < a < C), `<= 1` (a = C) for a solution on the training set.
pub fn kkt_residual(kernel: &dyn KernelMatrix, y: &[f64], solution: &SmoSolution, c: f64) -> f64 {
    let n = y.len();
    (0..n)
        .map(|i| {
            let f: f64 = (0..n).map(|j| solution.alphas[j] * y[j] * kernel.entry(i, j)).sum::<f64>() + solution.bias;
            let margin = y[i] * f - 1.0;
            let a = solution.alphas[i];
            if a <= 0.0 {
                (-margin).max(0.0)
            } else if a >= c {
                margin.max(0.0)
            } else {
                margin.abs()
            }
        })
        .fold(0.0, f64::max)
}
