//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use bruxkit::models::{BinaryLabel, KernelMatrix};
use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two Gaussian blobs `gap` apart along every axis.
pub fn blobs(n: usize, d: usize, gap: f64, seed: u64) -> (Array2<f64>, Vec<BinaryLabel>) {
    let mut r = rng(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut x = Array2::zeros((n, d));
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let label = if i % 2 == 0 { BinaryLabel::Positive } else { BinaryLabel::Silent };
        let centre = if label.is_positive() { gap / 2.0 } else { -gap / 2.0 };
        for j in 0..d {
            x[[i, j]] = centre + noise.sample(&mut r);
        }
        y.push(label);
    }
    (x, y)
}

/// O(N^2) DFT power `|X_k|^2` for k = 0..=N/2.
pub fn naive_power(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, v) in x.iter().enumerate() {
                let a = -2.0 * std::f64::consts::PI * (k * t) as f64 / n as f64;
                re += v * a.cos();
                im += v * a.sin();
            }
            re * re + im * im
        })
        .collect()
}

/// Orthonormal DCT-II through a naive DFT of the even extension
/// `[x_0 .. x_{N-1}, x_{N-1} .. x_0]`.
pub fn mirrored_dct(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let ext: Vec<f64> = x.iter().chain(x.iter().rev()).copied().collect();
    let m = 2 * n;
    (0..n)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, v) in ext.iter().enumerate() {
                let a = -2.0 * std::f64::consts::PI * (k * t) as f64 / m as f64;
                re += v * a.cos();
                im += v * a.sin();
            }
            // rotate by exp(-i pi k / 2N); the result is real
            let phi = -std::f64::consts::PI * k as f64 / m as f64;
            let real = re * phi.cos() - im * phi.sin();
            let scale = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
            scale * real / 2.0
        })
        .collect()
}

/// Full naive complex DFT.
pub fn naive_dft(x: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter().enumerate().fold((0.0, 0.0), |(re, im), (t, &(a, b))| {
                let ang = -2.0 * std::f64::consts::PI * ((k * t) % n) as f64 / n as f64;
                (re + a * ang.cos() - b * ang.sin(), im + a * ang.sin() + b * ang.cos())
            })
        })
        .collect()
}

/// Degree-1 least squares by Cramer's rule on the raw normal equations.
pub fn normal_equations_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    ((n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det)
}

/// Euclidean projection onto `{0 <= a <= c, y.a = 0}` by bisection on the
/// multiplier of the equality constraint.
fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |lambda: f64| -> Vec<f64> { v.iter().zip(y).map(|(vi, yi)| (vi - lambda * yi).clamp(0.0, c)).collect() };
    let g = |lambda: f64| -> f64 { at(lambda).iter().zip(y).map(|(a, yi)| a * yi).sum() };
    let bound = v.iter().map(|x| x.abs()).fold(0.0, f64::max) + c + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    // g is non-increasing in lambda
    while hi - lo > 1e-13 * (1.0 + bound) {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Accelerated projected gradient on the SVM dual. Returns the multipliers
/// and the dual objective `sum(a) - 1/2 a^T Q a`.
pub fn qp_oracle(kernel: &dyn KernelMatrix, y: &[f64], c: f64, iterations: usize) -> (Vec<f64>, f64) {
    let n = y.len();
    let q: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| y[i] * y[j] * kernel.entry(i, j)).collect()).collect();
    // Lipschitz bound: largest eigenvalue by power iteration, padded
    let mut v = vec![1.0; n];
    let mut lmax = 0.0;
    for _ in 0..500 {
        let w: Vec<f64> = q.iter().map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        lmax = norm / v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = w.iter().map(|x| x / norm).collect();
    }
    let step = 1.0 / (1.05 * lmax + 1e-12);
    let mut a = vec![0.0; n];
    let mut z = a.clone();
    let mut t = 1.0f64;
    for _ in 0..iterations {
        let grad: Vec<f64> = q.iter().map(|row| row.iter().zip(&z).map(|(qij, zj)| qij * zj).sum::<f64>() - 1.0).collect();
        let next = project(&z.iter().zip(&grad).map(|(zi, gi)| zi - step * gi).collect::<Vec<_>>(), y, c);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        z = next.iter().zip(&a).map(|(nx, ax)| nx + (t - 1.0) / t_next * (nx - ax)).collect();
        a = next;
        t = t_next;
    }
    let quad: f64 = (0..n).map(|i| (0..n).map(|j| a[i] * a[j] * q[i][j]).sum::<f64>()).sum();
    let objective = a.iter().sum::<f64>() - 0.5 * quad;
    (a, objective)
}

/// Random linearly separable 2-D problem with labels in {-1, +1}.
pub fn separable_problem(n: usize, r: &mut ChaCha8Rng) -> (Vec<[f64; 2]>, Vec<f64>) {
    let angle: f64 = r.random_range(0.0..std::f64::consts::TAU);
    let normal = [angle.cos(), angle.sin()];
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    while points.len() < n {
        let p = [r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)];
        let side = p[0] * normal[0] + p[1] * normal[1];
        if side.abs() < 0.3 {
            continue;
        }
        labels.push(if side > 0.0 { 1.0 } else { -1.0 });
        points.push(p);
    }
    if labels.iter().all(|&l| l == labels[0]) {
        labels[0] = -labels[0];
        points[0] = [-points[0][0], -points[0][1]];
    }
    (points, labels)
}
