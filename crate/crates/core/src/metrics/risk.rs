use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::EquityCurve;
use crate::stats::{is_flat, mean, pop_std, tail_count};

/// Quantile levels for the tail-based ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TailParams {
    /// STAR lower-tail level.
    pub alpha: f64,
    /// Rachev lower-tail level.
    pub beta: f64,
    /// Rachev upper-tail level; also the lower-tail divisor in modified Rachev.
    pub gamma: f64,
    /// Modified Rachev tail level on both sides.
    pub delta: f64,
    /// Modified Rachev upper-tail divisor.
    pub epsilon: f64,
}

impl Default for TailParams {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            beta: 0.05,
            gamma: 0.05,
            delta: 0.01,
            epsilon: 0.05,
        }
    }
}

impl TailParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("epsilon", self.epsilon),
        ] {
            if !(v > 0.0 && v <= 0.5) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "tail level {name} must lie in (0, 0.5], got {v}"
                )));
            }
        }
        Ok(())
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!(
            "tail level must lie in (0, 1], got {level}"
        )))
    }
}

fn sorted(returns: &[f64]) -> Result<Vec<f64>> {
    if returns.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidParameter("returns must be finite".into()));
    }
    let mut s = returns.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// Mean of the lowest `ceil(level N)` returns.
pub fn lower_tail_mean(returns: &[f64], level: f64) -> Result<f64> {
    check_level(level)?;
    let s = sorted(returns)?;
    let k = tail_count(level, s.len());
    if k == 0 {
        return Err(Error::EmptyTail);
    }
    Ok(mean(&s[..k]))
}

/// Mean of the highest `ceil(level N)` returns.
pub fn upper_tail_mean(returns: &[f64], level: f64) -> Result<f64> {
    check_level(level)?;
    let s = sorted(returns)?;
    let k = tail_count(level, s.len());
    if k == 0 {
        return Err(Error::EmptyTail);
    }
    Ok(mean(&s[s.len() - k..]))
}

fn tail_ratio(upper: f64, lower: f64) -> Result<f64> {
    if lower == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(upper / lower.abs())
}

/// Mean of `R - rf` over the population standard deviation. `excess` is
/// already net of the risk-free rate.
pub fn sharpe(excess: &[f64]) -> Result<f64> {
    if excess.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: excess.len(),
        });
    }
    if is_flat(excess) {
        return Err(Error::ZeroDeviation);
    }
    let sd = pop_std(excess);
    if sd == 0.0 {
        return Err(Error::ZeroDeviation);
    }
    Ok(mean(excess) / sd)
}

/// Mean excess return over the downside deviation `sqrt(mean(min(e, 0)^2))`.
pub fn sortino(excess: &[f64]) -> Result<f64> {
    if excess.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: excess.len(),
        });
    }
    let down = excess.iter().map(|e| e.min(0.0) * e.min(0.0)).sum::<f64>() / excess.len() as f64;
    if down == 0.0 {
        return Err(Error::ZeroDeviation);
    }
    Ok(mean(excess) / libm::sqrt(down))
}

/// Largest fractional decline from a running peak.
pub fn max_drawdown(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(i) = values.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidValue {
            field: "portfolio value",
            index: i,
        });
    }
    let mut peak = values[0];
    let mut worst = 0.0f64;
    for &v in values {
        peak = peak.max(v);
        worst = worst.max((peak - v) / peak);
    }
    Ok(worst)
}

/// Upper-tail mean at `gamma` over the lower-tail magnitude at `beta`.
pub fn rachev(returns: &[f64], beta: f64, gamma: f64) -> Result<f64> {
    let upper = upper_tail_mean(returns, gamma)?;
    let lower = lower_tail_mean(returns, beta)?;
    tail_ratio(upper, lower)
}

/// `(upper_delta / epsilon) / (|lower_delta| / gamma)`.
pub fn modified_rachev(returns: &[f64], delta: f64, epsilon: f64, gamma: f64) -> Result<f64> {
    if !(epsilon > 0.0 && gamma > 0.0) {
        return Err(Error::InvalidParameter(
            "epsilon and gamma must be positive".into(),
        ));
    }
    let upper = upper_tail_mean(returns, delta)?;
    let lower = lower_tail_mean(returns, delta)?;
    tail_ratio(upper / epsilon, lower / gamma)
}

/// Weighting applied to tail observations by `distortion_rrr`.
pub trait Distortion {
    /// Weight for the observation at relative position `u` in `(0, 1)`
    /// within its tail, with small `u` the most extreme.
    fn weight(&self, u: f64) -> f64;
}

/// Equal weights, which makes `distortion_rrr` a plain tail-mean ratio.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityDistortion;

impl Distortion for IdentityDistortion {
    fn weight(&self, _u: f64) -> f64 {
        1.0
    }
}

fn weighted_mean<'a>(tail: impl Iterator<Item = &'a f64>, k: usize, d: &dyn Distortion) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &r) in tail.enumerate() {
        let w = d.weight((i as f64 + 0.5) / k as f64);
        num += w * r;
        den += w;
    }
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(num / den)
}

/// Distortion-weighted tail-mean ratio at level `beta` on both sides.
pub fn distortion_rrr(returns: &[f64], beta: f64, distortion: &dyn Distortion) -> Result<f64> {
    check_level(beta)?;
    let s = sorted(returns)?;
    let k = tail_count(beta, s.len());
    if k == 0 {
        return Err(Error::EmptyTail);
    }
    let upper = weighted_mean(s[s.len() - k..].iter().rev(), k, distortion)?;
    let lower = weighted_mean(s[..k].iter(), k, distortion)?;
    tail_ratio(upper, lower)
}

/// Mean positive return over mean magnitude of negative returns.
pub fn gain_loss(returns: &[f64]) -> Result<f64> {
    let gains: Vec<f64> = returns.iter().copied().filter(|r| *r > 0.0).collect();
    let losses: Vec<f64> = returns.iter().filter(|r| **r < 0.0).map(|r| -r).collect();
    if gains.is_empty() || losses.is_empty() {
        return Err(Error::EmptyTail);
    }
    Ok(mean(&gains) / mean(&losses))
}

/// Mean excess return over the magnitude of CVaR at `alpha`. `risk_free`
/// is aligned with `returns`.
pub fn star(returns: &[f64], risk_free: &[f64], alpha: f64) -> Result<f64> {
    if risk_free.len() != returns.len() {
        return Err(Error::DimensionMismatch {
            expected: returns.len(),
            got: risk_free.len(),
        });
    }
    let cvar = lower_tail_mean(returns, alpha)?;
    let excess: Vec<f64> = returns.iter().zip(risk_free).map(|(r, f)| r - f).collect();
    tail_ratio(mean(&excess), cvar)
}

/// Mean return over the maximum drawdown of `values`.
pub fn minimax(returns: &[f64], values: &[f64]) -> Result<f64> {
    if returns.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mdd = max_drawdown(values)?;
    if mdd == 0.0 {
        return Err(Error::ZeroDrawdown);
    }
    Ok(mean(returns) / mdd)
}

/// `sum((2i - N - 1) R_(i)) / (N sum R)` over ascending returns, `i` from 1.
pub fn gini(returns: &[f64]) -> Result<f64> {
    let n = returns.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let s = sorted(returns)?;
    let total: f64 = s.iter().sum();
    if total == 0.0 {
        return Err(Error::ZeroSum);
    }
    let nf = n as f64;
    let num: f64 = s
        .iter()
        .enumerate()
        .map(|(i, r)| (2.0 * (i + 1) as f64 - nf - 1.0) * r)
        .sum();
    Ok(num / (nf * total))
}

/// Risk-reward summary of one equity curve. A ratio is `None` when its
/// preconditions fail on this curve (for example no drawdown at all).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub sharpe: Option<f64>,
    pub sortino: Option<f64>,
    pub max_drawdown: f64,
    pub rachev: Option<f64>,
    pub modified_rachev: Option<f64>,
    pub distortion_rrr: Option<f64>,
    pub gain_loss: Option<f64>,
    pub star: Option<f64>,
    pub minimax: Option<f64>,
    pub gini: Option<f64>,
    pub final_value: f64,
    pub total_return: f64,
}

impl RiskReport {
    pub fn compute(curve: &EquityCurve, tail: &TailParams) -> Result<Self> {
        tail.validate()?;
        let r = &curve.returns;
        if r.is_empty() {
            return Err(Error::EmptyInput);
        }
        let excess = curve.excess_returns();
        let path = curve.path();
        Ok(Self {
            sharpe: sharpe(&excess).ok(),
            sortino: sortino(&excess).ok(),
            max_drawdown: max_drawdown(&path)?,
            rachev: rachev(r, tail.beta, tail.gamma).ok(),
            modified_rachev: modified_rachev(r, tail.delta, tail.epsilon, tail.gamma).ok(),
            distortion_rrr: distortion_rrr(r, tail.beta, &IdentityDistortion).ok(),
            gain_loss: gain_loss(r).ok(),
            star: star(r, &curve.risk_free, tail.alpha).ok(),
            minimax: minimax(r, &path).ok(),
            gini: gini(r).ok(),
            final_value: curve.final_value(),
            total_return: curve.total_return(),
        })
    }
}
