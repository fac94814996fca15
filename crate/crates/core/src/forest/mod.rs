//! Bagged random-forest regressor built from CART trees.
//!
//! Tree `b` draws its bootstrap sample and its per-node feature subsets from
//! a ChaCha stream keyed by `(random_seed, b)`, so a forest is bit-identical
//! whether its trees are grown serially ([`ForestModel::fit`]) or one at a
//! time on separate threads ([`fit_tree`] + [`ForestModel::from_trees`]).

mod oob;
mod tree;

pub use oob::OobScore;
pub use tree::{best_split, Node, Split, Tree};

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use tree::GrowParams;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Matrix {
    pub fn new(data: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { data, rows, cols })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            data,
            rows: rows.len(),
            cols,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// `max(1, floor(log2 p))`
    Log2,
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, p: usize) -> usize {
        let k = match self {
            Self::Log2 => libm::floor(libm::log2(p as f64)) as usize,
            Self::Sqrt => libm::floor(libm::sqrt(p as f64)) as usize,
            Self::All => p,
            Self::Count(k) => k,
        };
        k.clamp(1, p.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
    pub random_seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_estimators: 100,
            max_depth: 60,
            min_samples_split: 10,
            min_samples_leaf: 1,
            max_features: MaxFeatures::Log2,
            random_seed: 42,
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.n_estimators < 1 {
            return bad("n_estimators must be >= 1");
        }
        if self.max_depth < 1 {
            return bad("max_depth must be >= 1");
        }
        if self.min_samples_split < 2 {
            return bad("min_samples_split must be >= 2");
        }
        if self.min_samples_leaf < 1 {
            return bad("min_samples_leaf must be >= 1");
        }
        if self.max_features == MaxFeatures::Count(0) {
            return bad("max_features count must be >= 1");
        }
        Ok(())
    }
}

/// One grown tree plus its in-bag counts (`inbag[i]` = times row `i` was drawn).
#[derive(Debug, Clone, PartialEq)]
pub struct FittedTree {
    pub tree: Tree,
    pub inbag: Vec<u32>,
}

fn check_inputs(x: &Matrix, y: &[f64]) -> Result<()> {
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    if x.rows() == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if x.cols() == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    if x.data.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "features and targets must be finite".into(),
        ));
    }
    Ok(())
}

/// Grows tree `index` of the forest described by `params`.
pub fn fit_tree(x: &Matrix, y: &[f64], params: &ForestParams, index: usize) -> Result<FittedTree> {
    params.validate()?;
    check_inputs(x, y)?;
    let n = x.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(params.random_seed);
    rng.set_stream(index as u64);

    let mut inbag = alloc::vec![0u32; n];
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let r = rng.random_range(0..n);
        inbag[r] += 1;
        rows.push(r);
    }
    rows.sort_unstable();

    let grow = GrowParams {
        max_depth: params.max_depth,
        min_samples_split: params.min_samples_split,
        min_samples_leaf: params.min_samples_leaf,
        features_per_node: params.max_features.resolve(x.cols()),
    };
    let tree = Tree::grow(x, y, rows, &grow, &mut rng);
    Ok(FittedTree { tree, inbag })
}

/// Per-feature mean decrease in impurity, normalised to sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub names: Vec<String>,
    pub importances: Vec<f64>,
}

impl ImportanceReport {
    /// `(name, importance)` sorted by descending importance.
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut out: Vec<(&str, f64)> = self
            .names
            .iter()
            .map(String::as_str)
            .zip(self.importances.iter().copied())
            .collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub params: ForestParams,
    pub feature_names: Vec<String>,
    pub n_features: usize,
    pub trees: Vec<Tree>,
    pub importances: Vec<f64>,
    /// Per-tree in-bag counts; absent on deserialised models.
    #[serde(skip)]
    inbag: Option<Vec<Vec<u32>>>,
}

impl ForestModel {
    /// Fits every tree in order on the calling thread.
    pub fn fit(x: &Matrix, y: &[f64], params: &ForestParams) -> Result<Self> {
        let fitted = (0..params.n_estimators)
            .map(|b| fit_tree(x, y, params, b))
            .collect::<Result<Vec<_>>>()?;
        Self::from_trees(x.cols(), params, fitted)
    }

    /// Assembles a forest from trees grown by [`fit_tree`], in index order.
    pub fn from_trees(n_features: usize, params: &ForestParams, fitted: Vec<FittedTree>) -> Result<Self> {
        if fitted.len() != params.n_estimators {
            return Err(Error::DimensionMismatch {
                expected: params.n_estimators,
                got: fitted.len(),
            });
        }
        let (trees, inbag): (Vec<Tree>, Vec<Vec<u32>>) =
            fitted.into_iter().map(|f| (f.tree, f.inbag)).unzip();
        let importances = mean_decrease_impurity(&trees, n_features);
        Ok(Self {
            params: *params,
            feature_names: (0..n_features).map(|j| alloc::format!("x{j}")).collect(),
            n_features,
            trees,
            importances,
            inbag: Some(inbag),
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: names.len(),
            });
        }
        self.feature_names = names;
        Ok(self)
    }

    /// Mean of the tree predictions.
    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: row.len(),
            });
        }
        let sum: f64 = self.trees.iter().map(|t| t.predict(row)).sum();
        Ok(sum / self.trees.len() as f64)
    }

    pub fn predict_matrix(&self, x: &Matrix) -> Result<Vec<f64>> {
        (0..x.rows()).map(|r| self.predict(x.row(r))).collect()
    }

    pub fn inbag(&self) -> Option<&[Vec<u32>]> {
        self.inbag.as_deref()
    }

    pub fn feature_importance(&self) -> ImportanceReport {
        ImportanceReport {
            names: self.feature_names.clone(),
            importances: self.importances.clone(),
        }
    }

    /// Out-of-bag evaluation on the rows the forest was trained on.
    pub fn oob_score(&self, x: &Matrix, y: &[f64]) -> Result<OobScore> {
        oob::score(self, x, y)
    }
}

/// `I_j = mean_b sum_{t splits on j} (n_t / n_root) * gain_t`, normalised.
fn mean_decrease_impurity(trees: &[Tree], n_features: usize) -> Vec<f64> {
    let mut imp = alloc::vec![0.0; n_features];
    for tree in trees {
        let root = tree.nodes[0].samples() as f64;
        for node in &tree.nodes {
            if let Node::Split {
                feature,
                gain,
                samples,
                ..
            } = *node
            {
                imp[feature] += samples as f64 / root * gain;
            }
        }
    }
    let total: f64 = imp.iter().sum();
    if total > 0.0 {
        for v in &mut imp {
            *v /= total;
        }
    }
    imp
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_data(n: usize, seed: u64) -> (Matrix, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..5).map(|_| rng.random::<f64>()).collect())
            .collect();
        let y = rows.iter().map(|r| f64::from(u8::from(r[0] > 0.5))).collect();
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    fn small(n_estimators: usize) -> ForestParams {
        ForestParams {
            n_estimators,
            ..ForestParams::default()
        }
    }

    #[test]
    fn constant_targets_give_single_leaves() {
        let (x, _) = step_data(50, 1);
        let y = alloc::vec![3.0; 50];
        let m = ForestModel::fit(&x, &y, &small(5)).unwrap();
        assert!(m.trees.iter().all(|t| t.nodes.len() == 1));
        assert_eq!(m.predict(x.row(0)).unwrap(), 3.0);
        assert!(m.importances.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn tiny_sample_predicts_bootstrap_mean() {
        let (x, _) = step_data(5, 2);
        let y = [1.0, 2.0, 3.0, 4.0, 5.0];
        let m = ForestModel::fit(&x, &y, &small(3)).unwrap();
        for (tree, inbag) in m.trees.iter().zip(m.inbag().unwrap()) {
            assert_eq!(tree.nodes.len(), 1);
            let mean = inbag
                .iter()
                .zip(&y)
                .map(|(&c, v)| f64::from(c) * v)
                .sum::<f64>()
                / 5.0;
            assert!((tree.predict(x.row(0)) - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn bootstrap_has_n_draws() {
        let (x, y) = step_data(300, 3);
        let m = ForestModel::fit(&x, &y, &small(4)).unwrap();
        for inbag in m.inbag().unwrap() {
            assert_eq!(inbag.iter().sum::<u32>(), 300);
        }
        assert_eq!(m.trees.len(), 4);
    }

    #[test]
    fn prediction_is_tree_mean() {
        let (x, y) = step_data(200, 4);
        let m = ForestModel::fit(&x, &y, &small(2)).unwrap();
        let row = x.row(7);
        let expect = (m.trees[0].predict(row) + m.trees[1].predict(row)) / 2.0;
        assert_eq!(m.predict(row).unwrap(), expect);
        assert!(matches!(
            m.predict(&[0.0; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
        // far outside the training range still lands on a leaf
        assert!(m.predict(&[1e9, -1e9, 0.0, 5.0, -3.0]).unwrap().is_finite());
    }

    #[test]
    fn serial_and_per_tree_fits_agree() {
        let (x, y) = step_data(400, 5);
        let p = small(6);
        let serial = ForestModel::fit(&x, &y, &p).unwrap();
        let trees = (0..6).rev().map(|b| fit_tree(&x, &y, &p, b).unwrap()).collect::<Vec<_>>();
        let trees = trees.into_iter().rev().collect();
        let assembled = ForestModel::from_trees(5, &p, trees).unwrap();
        assert_eq!(serial, assembled);
    }

    #[test]
    fn structure_respects_limits() {
        let (x, y) = step_data(500, 6);
        let p = ForestParams {
            n_estimators: 5,
            max_depth: 3,
            min_samples_leaf: 4,
            ..ForestParams::default()
        };
        let m = ForestModel::fit(&x, &y, &p).unwrap();
        for t in &m.trees {
            assert!(t.depth() <= 3);
            assert!(t.leaves().all(|l| l.samples() >= 4));
            for node in &t.nodes {
                if let Node::Split { gain, .. } = node {
                    assert!(*gain > 0.0);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let (x, y) = step_data(10, 7);
        assert!(matches!(
            ForestModel::fit(&x, &y[..9], &small(1)),
            Err(Error::DimensionMismatch { .. })
        ));
        let bad = ForestParams {
            min_samples_split: 1,
            ..ForestParams::default()
        };
        assert!(ForestModel::fit(&x, &y, &bad).is_err());
    }

    #[test]
    fn log2_features() {
        assert_eq!(MaxFeatures::Log2.resolve(5), 2);
        assert_eq!(MaxFeatures::Log2.resolve(1), 1);
        assert_eq!(MaxFeatures::Log2.resolve(20), 4);
        assert_eq!(MaxFeatures::Count(50).resolve(5), 5);
    }
}
