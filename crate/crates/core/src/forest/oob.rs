//! Out-of-bag evaluation: each training row is scored only by the trees
//! whose bootstrap sample left it out.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ForestModel, Matrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OobScore {
    /// `None` when no row is covered or the covered targets have zero variance.
    pub r2: Option<f64>,
    pub rmse: Option<f64>,
    /// Fraction of rows left out by at least one tree.
    pub coverage: f64,
    #[serde(skip)]
    pub predictions: Vec<Option<f64>>,
}

pub(super) fn score(model: &ForestModel, x: &Matrix, y: &[f64]) -> Result<OobScore> {
    let inbag = model.inbag().ok_or(Error::ModelNotFitted)?;
    let n = x.rows();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    if inbag.iter().any(|b| b.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: inbag.first().map_or(0, Vec::len),
            got: n,
        });
    }
    if x.cols() != model.n_features {
        return Err(Error::DimensionMismatch {
            expected: model.n_features,
            got: x.cols(),
        });
    }

    let mut sums = alloc::vec![0.0; n];
    let mut counts = alloc::vec![0u32; n];
    for (tree, bag) in model.trees.iter().zip(inbag) {
        for i in (0..n).filter(|&i| bag[i] == 0) {
            sums[i] += tree.predict(x.row(i));
            counts[i] += 1;
        }
    }
    let predictions: Vec<Option<f64>> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| (c > 0).then(|| s / f64::from(c)))
        .collect();

    let covered: Vec<(f64, f64)> = predictions
        .iter()
        .zip(y)
        .filter_map(|(p, &t)| p.map(|p| (t, p)))
        .collect();
    let coverage = covered.len() as f64 / n as f64;
    if covered.is_empty() {
        return Ok(OobScore {
            r2: None,
            rmse: None,
            coverage,
            predictions,
        });
    }
    let m = covered.len() as f64;
    let sse: f64 = covered.iter().map(|(t, p)| (t - p) * (t - p)).sum();
    let mean = covered.iter().map(|(t, _)| t).sum::<f64>() / m;
    let sst: f64 = covered.iter().map(|(t, _)| (t - mean) * (t - mean)).sum();
    Ok(OobScore {
        r2: (sst > 0.0).then(|| 1.0 - sse / sst),
        rmse: Some(libm::sqrt(sse / m)),
        coverage,
        predictions,
    })
}
