//! Buy/hold/sell decisions from the 33rd and 66th percentiles of the
//! training-set predictions.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signal {
    Buy,
    Hold,
    Sell,
}

impl Signal {
    pub fn as_str(self) -> &'static str {
        match self {
            Signal::Buy => "buy",
            Signal::Hold => "hold",
            Signal::Sell => "sell",
        }
    }

    /// Sell < Hold < Buy.
    pub fn rank(self) -> i8 {
        match self {
            Signal::Sell => -1,
            Signal::Hold => 0,
            Signal::Buy => 1,
        }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a prediction equal to both thresholds maps to when `q33 == q66`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    #[default]
    Buy,
    Hold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalThresholds {
    pub q33: f64,
    pub q66: f64,
    #[serde(default)]
    pub tie: TiePolicy,
}

/// Percentile with linear interpolation between closest ranks, on sorted input.
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = libm::floor(pos) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

impl SignalThresholds {
    pub fn fit(train_predictions: &[f64]) -> Result<Self> {
        if train_predictions.is_empty() {
            return Err(Error::EmptyInput);
        }
        if train_predictions.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter(
                "predictions must be finite".into(),
            ));
        }
        let mut sorted: Vec<f64> = train_predictions.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            q33: percentile_sorted(&sorted, 0.33),
            q66: percentile_sorted(&sorted, 0.66),
            tie: TiePolicy::Buy,
        })
    }

    pub fn with_tie_policy(mut self, tie: TiePolicy) -> Self {
        self.tie = tie;
        self
    }

    /// `buy` at or above q66, `sell` at or below q33, `hold` in between.
    pub fn classify(&self, prediction: f64) -> Signal {
        if self.q33 == self.q66 && prediction == self.q66 && self.tie == TiePolicy::Hold {
            return Signal::Hold;
        }
        if prediction >= self.q66 {
            Signal::Buy
        } else if prediction <= self.q33 {
            Signal::Sell
        } else {
            Signal::Hold
        }
    }

    pub fn classify_all(&self, predictions: &[f64]) -> Vec<Signal> {
        predictions.iter().map(|&p| self.classify(p)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn evenly_spaced_grid() {
        let preds: Vec<f64> = (0..=100).map(|i| f64::from(i) / 100.0).collect();
        let t = SignalThresholds::fit(&preds).unwrap();
        assert!((t.q33 - 0.33).abs() < 1e-12);
        assert!((t.q66 - 0.66).abs() < 1e-12);
    }

    #[test]
    fn constant_and_single() {
        let t = SignalThresholds::fit(&[2.5; 7]).unwrap();
        assert_eq!((t.q33, t.q66), (2.5, 2.5));
        let t = SignalThresholds::fit(&[-1.0]).unwrap();
        assert_eq!((t.q33, t.q66), (-1.0, -1.0));
        assert_eq!(SignalThresholds::fit(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn boundaries() {
        let t = SignalThresholds {
            q33: -1.0,
            q66: 1.0,
            tie: TiePolicy::Buy,
        };
        assert_eq!(t.classify(1.0), Signal::Buy);
        assert_eq!(t.classify(-1.0), Signal::Sell);
        assert_eq!(t.classify(0.0), Signal::Hold);
    }

    #[test]
    fn equal_thresholds_prefer_buy() {
        let t = SignalThresholds {
            q33: 0.0,
            q66: 0.0,
            tie: TiePolicy::Buy,
        };
        assert_eq!(t.classify(0.0), Signal::Buy);
        assert_eq!(t.with_tie_policy(TiePolicy::Hold).classify(0.0), Signal::Hold);
    }

    #[test]
    fn interpolates_between_ranks() {
        // pos = 0.33 * 3 = 0.99 -> 1 + 0.99 * (2 - 1)
        let t = SignalThresholds::fit(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert!((t.q33 - 1.99).abs() < 1e-12);
        assert!((t.q66 - 2.98).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn classify_is_monotone(
            preds in prop::collection::vec(-1.0f64..1.0, 1..200),
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
        ) {
            let t = SignalThresholds::fit(&preds).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(t.classify(lo).rank() <= t.classify(hi).rank());
            prop_assert!(t.q33 <= t.q66);
        }
    }
}
