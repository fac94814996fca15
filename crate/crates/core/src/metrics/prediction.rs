use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check(y: &[f64], yhat: &[f64]) -> Result<()> {
    if y.len() != yhat.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: yhat.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

pub fn rmse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check(y, yhat)?;
    let sse: f64 = y.iter().zip(yhat).map(|(a, b)| (b - a) * (b - a)).sum();
    Ok(libm::sqrt(sse / y.len() as f64))
}

pub fn mae(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check(y, yhat)?;
    Ok(y.iter().zip(yhat).map(|(a, b)| (b - a).abs()).sum::<f64>() / y.len() as f64)
}

/// `1 - SSE / SST`; errors when `y` has zero variance.
pub fn r2(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check(y, yhat)?;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let sst: f64 = y.iter().map(|a| (a - mean) * (a - mean)).sum();
    if sst == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let sse: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(1.0 - sse / sst)
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Share of rows where actual and predicted signs agree (0 only matches 0).
pub fn trend_accuracy(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check(y, yhat)?;
    let hits = y.iter().zip(yhat).filter(|(a, b)| sign(**a) == sign(**b)).count();
    Ok(hits as f64 / y.len() as f64)
}

/// Pearson correlation.
pub fn correlation(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check(y, yhat)?;
    let n = y.len() as f64;
    let my = y.iter().sum::<f64>() / n;
    let mp = yhat.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vy = 0.0;
    let mut vp = 0.0;
    for (a, b) in y.iter().zip(yhat) {
        cov += (a - my) * (b - mp);
        vy += (a - my) * (a - my);
        vp += (b - mp) * (b - mp);
    }
    if vy == 0.0 || vp == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(cov / libm::sqrt(vy * vp))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionMetrics {
    pub n: usize,
    pub rmse: f64,
    pub mae: f64,
    pub r2: Option<f64>,
    pub trend_accuracy: f64,
    pub correlation: Option<f64>,
}

impl PredictionMetrics {
    pub fn compute(y: &[f64], yhat: &[f64]) -> Result<Self> {
        Ok(Self {
            n: y.len(),
            rmse: rmse(y, yhat)?,
            mae: mae(y, yhat)?,
            r2: r2(y, yhat).ok(),
            trend_accuracy: trend_accuracy(y, yhat)?,
            correlation: correlation(y, yhat).ok(),
        })
    }
}
