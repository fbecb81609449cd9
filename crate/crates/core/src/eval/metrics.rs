use serde::{Deserialize, Serialize};

use crate::models::BinaryLabel;

/// Binary confusion counts with respect to the positive event.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn from_pairs(truth: &[BinaryLabel], predicted: &[BinaryLabel]) -> Self {
        assert_eq!(truth.len(), predicted.len());
        let mut c = Confusion::default();
        for (t, p) in truth.iter().zip(predicted) {
            c.record(*t, *p);
        }
        c
    }

    pub fn record(&mut self, truth: BinaryLabel, predicted: BinaryLabel) {
        match (truth.is_positive(), predicted.is_positive()) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn merge(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Metrics {
    pub const NAMES: [&'static str; 4] = ["accuracy", "precision", "recall", "f1"];

    pub fn values(&self) -> [f64; 4] {
        [self.accuracy, self.precision, self.recall, self.f1]
    }

    pub fn from_values(v: [f64; 4]) -> Self {
        Self { accuracy: v[0], precision: v[1], recall: v[2], f1: v[3] }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1_of(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Accuracy plus precision, recall and F1 macro-averaged over the positive
/// and silent classes. An undefined per-class value counts as 0.
pub fn metrics(c: &Confusion) -> Metrics {
    let total = c.total();
    let accuracy = ratio(c.tp + c.tn, total);
    let (p_pos, p_neg) = (ratio(c.tp, c.tp + c.fp), ratio(c.tn, c.tn + c.fn_));
    let (r_pos, r_neg) = (ratio(c.tp, c.tp + c.fn_), ratio(c.tn, c.tn + c.fp));
    Metrics {
        accuracy,
        precision: (p_pos + p_neg) / 2.0,
        recall: (r_pos + r_neg) / 2.0,
        f1: (f1_of(p_pos, r_pos) + f1_of(p_neg, r_neg)) / 2.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_negative_predictor() {
        let m = metrics(&Confusion { tp: 0, fp: 0, fn_: 1695, tn: 4815 });
        let majority = 4815.0 / 6510.0;
        assert!((m.accuracy - majority).abs() < 1e-15);
        assert_eq!(m.recall, 0.5);
        assert!((m.precision - majority / 2.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_and_symmetric() {
        let m = metrics(&Confusion { tp: 10, fp: 0, fn_: 0, tn: 7 });
        assert_eq!(m.values(), [1.0; 4]);
        let m = metrics(&Confusion { tp: 25, fp: 25, fn_: 25, tn: 25 });
        assert_eq!(m.values(), [0.5; 4]);
    }

    #[test]
    fn serde_uses_fn_key() {
        let json = serde_json::to_string(&Confusion { tp: 1, fp: 2, fn_: 3, tn: 4 }).unwrap();
        assert_eq!(json, r#"{"tp":1,"fp":2,"fn":3,"tn":4}"#);
    }
}
