mod oracle;

use barforest_core::forest::{fit_tree, Matrix, Node};
use barforest_core::metrics::r2;
use barforest_core::{ForestModel, ForestParams, MaxFeatures};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn uniform(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Matrix {
    let data = (0..n * p).map(|_| rng.random_range(0.0..1.0)).collect();
    Matrix::new(data, n, p).unwrap()
}

fn step_target(x: &Matrix) -> Vec<f64> {
    (0..x.rows()).map(|r| f64::from(u8::from(x.get(r, 0) > 0.5))).collect()
}

#[test]
fn learns_a_step_function() {
    let mut rng = oracle::rng(1);
    let x = uniform(&mut rng, 2000, 5);
    let y = step_target(&x);
    let model = ForestModel::fit(&x, &y, &ForestParams::default()).unwrap();
    let oob = model.oob_score(&x, &y).unwrap();
    assert!(oob.r2.unwrap() >= 0.95, "oob r2 {:?}", oob.r2);
    assert!(model.importances[0] >= 0.8, "importances {:?}", model.importances);
    assert!((model.importances.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn noise_targets_do_not_generalise() {
    let mut rng = oracle::rng(2);
    let x = uniform(&mut rng, 3000, 5);
    let y: Vec<f64> = (0..3000).map(|_| rng.random_range(-1.0..1.0)).collect();
    let (train_x, test_x) = (rows(&x, 0..2400), rows(&x, 2400..3000));
    let model = ForestModel::fit(&train_x, &y[..2400], &ForestParams::default()).unwrap();
    let in_sample = r2(&y[..2400], &model.predict_matrix(&train_x).unwrap()).unwrap();
    let out_sample = r2(&y[2400..], &model.predict_matrix(&test_x).unwrap()).unwrap();
    assert!(in_sample > 0.3, "train r2 {in_sample}");
    assert!(out_sample <= 0.05, "test r2 {out_sample}");
}

fn rows(x: &Matrix, range: std::ops::Range<usize>) -> Matrix {
    let v: Vec<Vec<f64>> = range.map(|r| x.row(r).to_vec()).collect();
    Matrix::from_rows(&v).unwrap()
}

#[test]
fn single_tree_oob_coverage_is_bootstrap_exclusion() {
    let mut rng = oracle::rng(3);
    let x = uniform(&mut rng, 10_000, 3);
    let y: Vec<f64> = (0..10_000).map(|r| x.get(r, 1)).collect();
    let params = ForestParams {
        n_estimators: 1,
        max_depth: 4,
        ..ForestParams::default()
    };
    let model = ForestModel::fit(&x, &y, &params).unwrap();
    let oob = model.oob_score(&x, &y).unwrap();
    // P(row never drawn) = (1 - 1/n)^n, about e^-1; the in-bag share is the rest
    assert!((oob.coverage - (-1.0f64).exp()).abs() < 0.02, "coverage {}", oob.coverage);
    let in_bag = model.inbag().unwrap()[0].iter().filter(|&&c| c > 0).count();
    assert!((in_bag as f64 / 1e4 - 0.632).abs() < 0.05);
}

#[test]
fn refits_are_identical() {
    let mut rng = oracle::rng(4);
    let x = uniform(&mut rng, 500, 4);
    let y: Vec<f64> = (0..500).map(|r| x.get(r, 2) - x.get(r, 3)).collect();
    let params = ForestParams {
        n_estimators: 20,
        ..ForestParams::default()
    };
    let a = ForestModel::fit(&x, &y, &params).unwrap();
    let b = ForestModel::fit(&x, &y, &params).unwrap();
    assert_eq!(a, b);
    let c = ForestModel::fit(&x, &y, &ForestParams { random_seed: 7, ..params }).unwrap();
    assert_ne!(a.trees, c.trees);
    // tree b depends only on (seed, b), so trees can be grown in any order
    let t5 = fit_tree(&x, &y, &params, 5).unwrap();
    assert_eq!(t5.tree, a.trees[5]);
}

#[test]
fn trees_respect_structure_limits() {
    let mut rng = oracle::rng(5);
    let x = uniform(&mut rng, 800, 6);
    let y: Vec<f64> = (0..800).map(|_| rng.random_range(0.0..1.0)).collect();
    let params = ForestParams {
        n_estimators: 10,
        max_depth: 6,
        min_samples_split: 20,
        min_samples_leaf: 5,
        max_features: MaxFeatures::Sqrt,
        random_seed: 9,
    };
    let model = ForestModel::fit(&x, &y, &params).unwrap();
    for tree in &model.trees {
        assert!(tree.depth() <= 6);
        for node in &tree.nodes {
            match *node {
                Node::Leaf { samples, .. } => assert!(samples >= 5),
                Node::Split {
                    samples,
                    left,
                    right,
                    gain,
                    ..
                } => {
                    assert!(samples >= 20);
                    assert!(gain > 0.0);
                    assert_eq!(tree.nodes[left].samples() + tree.nodes[right].samples(), samples);
                }
            }
        }
        assert_eq!(tree.nodes[0].samples(), 800);
    }
}

#[test]
fn fewer_rows_than_split_minimum_gives_mean_leaves() {
    let x = Matrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0], vec![4.0], vec![5.0]]).unwrap();
    let y = [1.0, 2.0, 3.0, 4.0, 5.0];
    let model = ForestModel::fit(&x, &y, &ForestParams::default()).unwrap();
    for (tree, bag) in model.trees.iter().zip(model.inbag().unwrap()) {
        assert_eq!(tree.nodes.len(), 1);
        let want = bag.iter().zip(&y).map(|(&c, v)| f64::from(c) * v).sum::<f64>() / 5.0;
        assert!((tree.predict(&[0.0]) - want).abs() < 1e-12);
    }
}

#[test]
fn json_round_trip_preserves_predictions() {
    let mut rng = oracle::rng(6);
    let x = uniform(&mut rng, 300, 3);
    let y: Vec<f64> = (0..300).map(|r| (x.get(r, 0) * 7.0).sin()).collect();
    let params = ForestParams {
        n_estimators: 15,
        ..ForestParams::default()
    };
    let model = ForestModel::fit(&x, &y, &params).unwrap();
    let json = serde_json::to_string(&model).unwrap();
    let back: ForestModel = serde_json::from_str(&json).unwrap();
    assert_eq!(back.trees, model.trees);
    assert_eq!(back.predict_matrix(&x).unwrap(), model.predict_matrix(&x).unwrap());
    assert!(back.oob_score(&x, &y).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn predictions_stay_within_target_range(seed in 0u64..1000, n in 2usize..120) {
        let mut rng = oracle::rng(seed);
        let x = uniform(&mut rng, n, 3);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let params = ForestParams { n_estimators: 8, random_seed: seed, ..ForestParams::default() };
        let model = ForestModel::fit(&x, &y, &params).unwrap();
        let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let probe = uniform(&mut rng, 30, 3);
        for p in model.predict_matrix(&probe).unwrap() {
            prop_assert!(p >= lo - 1e-12 && p <= hi + 1e-12);
        }
    }
}
