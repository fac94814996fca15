//! CART regression trees grown on variance reduction.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Matrix;

/// Tree node stored in a flat arena; children are arena indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        value: f64,
        samples: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        /// Decrease in node MSE achieved by this split.
        gain: f64,
        samples: usize,
    },
}

impl Node {
    pub fn samples(&self) -> usize {
        match *self {
            Node::Leaf { samples, .. } | Node::Split { samples, .. } => samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

/// Best threshold found for a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// `MSE(parent) - (n_L MSE(L) + n_R MSE(R)) / n`.
    pub gain: f64,
}

pub(crate) struct GrowParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub features_per_node: usize,
}

impl Tree {
    /// Routes `row` to a leaf; `x[feature] <= threshold` goes left.
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value, .. } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    /// Longest root-to-leaf path, counted in edges.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. }))
    }

    /// Grows a tree on the sample multiset `rows` (duplicates allowed).
    pub(crate) fn grow<R: Rng>(
        x: &Matrix,
        y: &[f64],
        rows: Vec<usize>,
        params: &GrowParams,
        rng: &mut R,
    ) -> Tree {
        let mut builder = Builder {
            x,
            y,
            params,
            nodes: Vec::new(),
            scratch: Vec::new(),
            feature_pool: (0..x.cols()).collect(),
        };
        builder.node(rows, 0, rng);
        Tree {
            nodes: builder.nodes,
        }
    }
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [f64],
    params: &'a GrowParams,
    nodes: Vec<Node>,
    scratch: Vec<(f64, f64)>,
    feature_pool: Vec<usize>,
}

impl Builder<'_> {
    fn node<R: Rng>(&mut self, rows: Vec<usize>, depth: usize, rng: &mut R) -> usize {
        let id = self.nodes.len();
        let samples = rows.len();
        let mean = rows.iter().map(|&r| self.y[r]).sum::<f64>() / samples as f64;
        self.nodes.push(Node::Leaf {
            value: mean,
            samples,
        });

        let first = self.y[rows[0]];
        let pure = rows.iter().all(|&r| self.y[r] == first);
        if depth >= self.params.max_depth || samples < self.params.min_samples_split || pure {
            return id;
        }

        let k = self.params.features_per_node;
        let pool = &mut self.feature_pool;
        for i in 0..k {
            let j = rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        let mut candidates = pool[..k].to_vec();
        candidates.sort_unstable();

        let Some(split) = search(
            self.x,
            self.y,
            &rows,
            &candidates,
            self.params.min_samples_leaf,
            &mut self.scratch,
        ) else {
            return id;
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.x.get(r, split.feature) <= split.threshold);
        let left = self.node(left_rows, depth + 1, rng);
        let right = self.node(right_rows, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
            gain: split.gain,
            samples,
        };
        id
    }
}

/// Exhaustive threshold search over `features` for the node holding `rows`.
///
/// Thresholds sit at midpoints between consecutive distinct values. Ties in
/// gain keep the earlier candidate, so the lowest feature index (in the order
/// given) and then the lowest threshold win. Returns `None` when no split
/// leaves `min_samples_leaf` rows on both sides with positive gain.
pub fn best_split(
    x: &Matrix,
    y: &[f64],
    rows: &[usize],
    features: &[usize],
    min_samples_leaf: usize,
) -> Option<Split> {
    search(x, y, rows, features, min_samples_leaf, &mut Vec::new())
}

fn search(
    x: &Matrix,
    y: &[f64],
    rows: &[usize],
    features: &[usize],
    min_samples_leaf: usize,
    scratch: &mut Vec<(f64, f64)>,
) -> Option<Split> {
    let n = rows.len();
    let min_leaf = min_samples_leaf.max(1);
    if n < 2 * min_leaf {
        return None;
    }
    let nf = n as f64;
    let mean = rows.iter().map(|&r| y[r]).sum::<f64>() / nf;
    // centred targets keep the sum-of-squares identity well conditioned
    let total_sq: f64 = rows.iter().map(|&r| (y[r] - mean) * (y[r] - mean)).sum();
    let total_sum: f64 = rows.iter().map(|&r| y[r] - mean).sum();
    let parent_mse = total_sq / nf - (total_sum / nf) * (total_sum / nf);

    let mut best: Option<Split> = None;
    for &feature in features {
        scratch.clear();
        scratch.extend(rows.iter().map(|&r| (x.get(r, feature), y[r] - mean)));
        scratch.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        for k in 0..n - 1 {
            let (xv, c) = scratch[k];
            left_sum += c;
            left_sq += c * c;
            let next = scratch[k + 1].0;
            let n_left = k + 1;
            let n_right = n - n_left;
            if xv == next || n_left < min_leaf || n_right < min_leaf {
                continue;
            }
            let (nl, nr) = (n_left as f64, n_right as f64);
            let right_sum = total_sum - left_sum;
            let right_sq = total_sq - left_sq;
            let sse_left = (left_sq - left_sum * left_sum / nl).max(0.0);
            let sse_right = (right_sq - right_sum * right_sum / nr).max(0.0);
            let gain = parent_mse - (sse_left + sse_right) / nf;
            if gain > 0.0 && best.map_or(true, |b| gain > b.gain) {
                let mut threshold = xv + (next - xv) / 2.0;
                if threshold >= next {
                    threshold = xv;
                }
                best = Some(Split {
                    feature,
                    threshold,
                    gain,
                });
            }
        }
    }
    best
}
