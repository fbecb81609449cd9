//! CART classification tree with Gini impurity.
//!
//! A split sends `x[feature] <= threshold` left, where the threshold is the
//! largest training value on the left side. Partitions, and therefore
//! predictions, are unchanged by any strictly increasing per-feature map.

use ndarray::{ArrayView1, ArrayView2};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::BinaryLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Candidate features per split; `None` uses all.
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self { max_depth: None, min_samples_leaf: 1, max_features: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf { label: BinaryLabel, positive: usize, silent: usize },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

/// `n * gini` of a node with the given class counts.
fn weighted_gini(pos: usize, neg: usize) -> f64 {
    let n = (pos + neg) as f64;
    if n == 0.0 {
        return 0.0;
    }
    n - ((pos * pos + neg * neg) as f64) / n
}

impl DecisionTree {
    /// Fit on every row of `x`. `seed` only matters when `max_features`
    /// restricts the candidate features.
    pub fn fit(x: ArrayView2<f64>, y: &[BinaryLabel], params: &TreeParams, seed: u64) -> Self {
        let rows: Vec<usize> = (0..x.nrows()).collect();
        Self::fit_rows(x, y, &rows, params, &mut crate::seed::stream(&[seed]))
    }

    /// Fit on the multiset `rows` (duplicates allowed). `rng` is only drawn
    /// from when `max_features` is smaller than the feature count.
    pub fn fit_rows<R: Rng>(
        x: ArrayView2<f64>,
        y: &[BinaryLabel],
        rows: &[usize],
        params: &TreeParams,
        rng: &mut R,
    ) -> Self {
        let n_features = x.ncols();
        let max_features = params.max_features.unwrap_or(n_features).clamp(1, n_features.max(1));
        let min_leaf = params.min_samples_leaf.max(1);
        let mut nodes: Vec<Node> = Vec::new();
        // (node slot, rows, depth)
        let mut work: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        nodes.push(Node::Leaf { label: BinaryLabel::Silent, positive: 0, silent: 0 });
        work.push((0, rows.to_vec(), 0));

        let mut pairs: Vec<(f64, bool)> = Vec::with_capacity(rows.len());
        while let Some((slot, idx, depth)) = work.pop() {
            let positive = idx.iter().filter(|&&r| y[r].is_positive()).count();
            let silent = idx.len() - positive;
            let leaf = Node::Leaf { label: BinaryLabel::majority(positive, silent), positive, silent };
            let stop = positive == 0
                || silent == 0
                || params.max_depth.is_some_and(|d| depth >= d)
                || idx.len() < 2 * min_leaf;
            if stop {
                nodes[slot] = leaf;
                continue;
            }

            let order: Vec<usize> = if max_features >= n_features {
                (0..n_features).collect()
            } else {
                sample(rng, n_features, n_features).into_vec()
            };
            let mut head = order[..max_features].to_vec();
            head.sort_unstable();
            let mut best: Option<Candidate> = None;
            for &f in &head {
                best = better(best, best_split(x, y, &idx, f, min_leaf, positive, silent, &mut pairs));
            }
            // keep drawing features until one of them can split the node
            for &f in &order[max_features..] {
                if best.is_some() {
                    break;
                }
                best = best_split(x, y, &idx, f, min_leaf, positive, silent, &mut pairs);
            }

            let Some(split) = best else {
                nodes[slot] = leaf;
                continue;
            };
            let (left, right): (Vec<usize>, Vec<usize>) =
                idx.iter().partition(|&&r| x[[r, split.feature]] <= split.threshold);
            let left_slot = nodes.len();
            nodes.push(Node::Leaf { label: BinaryLabel::Silent, positive: 0, silent: 0 });
            let right_slot = nodes.len();
            nodes.push(Node::Leaf { label: BinaryLabel::Silent, positive: 0, silent: 0 });
            nodes[slot] = Node::Split { feature: split.feature, threshold: split.threshold, left: left_slot, right: right_slot };
            work.push((right_slot, right, depth + 1));
            work.push((left_slot, left, depth + 1));
        }
        Self { nodes }
    }

    pub fn predict_row(&self, row: ArrayView1<f64>) -> BinaryLabel {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { label, .. } => return *label,
                Node::Split { feature, threshold, left, right } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

fn better(current: Option<Candidate>, challenger: Option<Candidate>) -> Option<Candidate> {
    match (current, challenger) {
        (Some(c), Some(n)) if n.impurity < c.impurity => Some(n),
        (Some(c), _) => Some(c),
        (None, n) => n,
    }
}

#[allow(clippy::too_many_arguments)]
fn best_split(
    x: ArrayView2<f64>,
    y: &[BinaryLabel],
    idx: &[usize],
    feature: usize,
    min_leaf: usize,
    positive: usize,
    silent: usize,
    pairs: &mut Vec<(f64, bool)>,
) -> Option<Candidate> {
    pairs.clear();
    pairs.extend(idx.iter().map(|&r| (x[[r, feature]], y[r].is_positive())));
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pairs.len();
    let (mut lp, mut ln) = (0usize, 0usize);
    let mut best: Option<Candidate> = None;
    for i in 0..n - 1 {
        if pairs[i].1 {
            lp += 1;
        } else {
            ln += 1;
        }
        let left = i + 1;
        if pairs[i].0 == pairs[i + 1].0 || left < min_leaf || n - left < min_leaf {
            continue;
        }
        let impurity = weighted_gini(lp, ln) + weighted_gini(positive - lp, silent - ln);
        if best.as_ref().is_none_or(|b| impurity < b.impurity) {
            best = Some(Candidate { feature, threshold: pairs[i].0, impurity });
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use proptest::prelude::*;
    use BinaryLabel::{Positive as P, Silent as S};

    #[test]
    fn learns_a_threshold() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let t = DecisionTree::fit(x.view(), &[S, S, P, P], &TreeParams::default(), 0);
        assert_eq!(t.depth(), 1);
        assert!(matches!(t.nodes[0], Node::Split { threshold, .. } if threshold == 1.0));
        assert_eq!(t.predict_row(array![1.5].view()), P);
        assert_eq!(t.predict_row(array![-9.0].view()), S);
    }

    #[test]
    fn conflicting_duplicates_tie_to_silent() {
        let x = array![[1.0, 1.0], [1.0, 1.0]];
        let t = DecisionTree::fit(x.view(), &[P, S], &TreeParams::default(), 0);
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict_row(array![1.0, 1.0].view()), S);
        let x3 = array![[1.0], [1.0], [1.0]];
        let t3 = DecisionTree::fit(x3.view(), &[P, S, P], &TreeParams::default(), 0);
        assert_eq!(t3.predict_row(array![1.0].view()), P);
    }

    #[test]
    fn xor_needs_a_zero_gain_split() {
        let x = array![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        let y = [S, P, P, S];
        let t = DecisionTree::fit(x.view(), &y, &TreeParams::default(), 0);
        for (row, label) in x.rows().into_iter().zip(y) {
            assert_eq!(t.predict_row(row), label);
        }
    }

    #[test]
    fn depth_limit_is_respected() {
        let x = Array2::from_shape_fn((16, 1), |(i, _)| i as f64);
        let y: Vec<_> = (0..16).map(|i| if i % 2 == 0 { S } else { P }).collect();
        let p = TreeParams { max_depth: Some(2), ..TreeParams::default() };
        assert!(DecisionTree::fit(x.view(), &y, &p, 0).depth() <= 2);
    }

    proptest! {
        #[test]
        fn increasing_maps_leave_predictions_unchanged(
            v in proptest::collection::vec(-5.0f64..5.0, 60),
            labels in proptest::collection::vec(any::<bool>(), 20),
            probes in proptest::collection::vec(-6.0f64..6.0, 30),
        ) {
            let x = Array2::from_shape_vec((20, 3), v).unwrap();
            let y: Vec<_> = labels.iter().map(|&b| if b { P } else { S }).collect();
            let map = |j: usize, a: f64| match j { 0 => a.powi(3), 1 => a.exp(), _ => 2.0 * a + 7.0 };
            let xt = Array2::from_shape_fn((20, 3), |(i, j)| map(j, x[[i, j]]));
            let t = DecisionTree::fit(x.view(), &y, &TreeParams::default(), 0);
            let tt = DecisionTree::fit(xt.view(), &y, &TreeParams::default(), 0);
            let q = Array2::from_shape_vec((10, 3), probes).unwrap();
            for row in x.rows().into_iter().chain(q.rows()) {
                let mapped = ndarray::Array1::from_shape_fn(3, |j| map(j, row[j]));
                prop_assert_eq!(t.predict_row(row), tt.predict_row(mapped.view()));
            }
        }
    }
}
