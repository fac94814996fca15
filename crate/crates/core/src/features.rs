//! Assembly of the per-bar feature matrix: five price/volume base columns,
//! the selected indicator families, and the forward log-return target.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{log_returns, volume_zscore, BarSeries, PriceField};
use crate::error::{Error, Result};
use crate::forest::Matrix;
use crate::indicators::{self, IndicatorConfig};

pub use crate::indicators::FeatureColumn;

/// The twelve indicator families that can be layered on the base features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IndicatorFamily {
    #[serde(rename = "sma")]
    Sma,
    #[serde(rename = "ema")]
    Ema,
    #[serde(rename = "macd")]
    Macd,
    #[serde(rename = "rsi")]
    Rsi,
    #[serde(rename = "boll")]
    Bollinger,
    #[serde(rename = "so")]
    Stochastic,
    #[serde(rename = "fib")]
    Fibonacci,
    #[serde(rename = "adx")]
    Adx,
    #[serde(rename = "obv")]
    Obv,
    #[serde(rename = "wrobv")]
    Wrobv,
    #[serde(rename = "cci")]
    Cci,
    #[serde(rename = "ichi")]
    Ichimoku,
}

impl IndicatorFamily {
    pub const ALL: [IndicatorFamily; 12] = [
        Self::Sma,
        Self::Ema,
        Self::Macd,
        Self::Rsi,
        Self::Bollinger,
        Self::Stochastic,
        Self::Fibonacci,
        Self::Adx,
        Self::Obv,
        Self::Wrobv,
        Self::Cci,
        Self::Ichimoku,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Sma => "sma",
            Self::Ema => "ema",
            Self::Macd => "macd",
            Self::Rsi => "rsi",
            Self::Bollinger => "boll",
            Self::Stochastic => "so",
            Self::Fibonacci => "fib",
            Self::Adx => "adx",
            Self::Obv => "obv",
            Self::Wrobv => "wrobv",
            Self::Cci => "cci",
            Self::Ichimoku => "ichi",
        }
    }

    /// Feature columns this family contributes.
    pub fn columns(self, series: &BarSeries, cfg: &IndicatorConfig) -> Result<Vec<FeatureColumn>> {
        let bars = series.bars();
        Ok(match self {
            Self::Sma => alloc::vec![indicators::sma_norm(bars, cfg.sma_window)?],
            Self::Ema => alloc::vec![indicators::ema_norm(bars, cfg.ema_window)?],
            Self::Macd => alloc::vec![indicators::macd_ratio(bars, cfg.macd)?],
            Self::Rsi => alloc::vec![indicators::rsi(bars, cfg.rsi_window)?],
            Self::Bollinger => alloc::vec![indicators::bollinger_pctb(bars, cfg.bollinger)?],
            Self::Stochastic => {
                let (k, d) =
                    indicators::stochastic(bars, cfg.stochastic.k_window, cfg.stochastic.d_window)?;
                alloc::vec![k, d]
            }
            Self::Fibonacci => {
                let (r, dist) = indicators::fib_retracement(bars, cfg.fib_window)?;
                alloc::vec![r, dist]
            }
            Self::Adx => alloc::vec![indicators::adx(bars, cfg.adx_window)?],
            Self::Obv => alloc::vec![indicators::obv(bars)?],
            Self::Wrobv => alloc::vec![indicators::wrobv(bars, cfg.wrobv_window)?],
            Self::Cci => alloc::vec![indicators::cci(bars, cfg.cci_window)?],
            Self::Ichimoku => {
                let ichi = indicators::ichimoku(bars, cfg.ichimoku)?;
                alloc::vec![ichi.senkou_a, ichi.senkou_b]
            }
        })
    }
}

impl fmt::Display for IndicatorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndicatorFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownIndicator(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub indicators: IndicatorConfig,
    pub volume_z_window: usize,
    /// Target is the close log return this many bars ahead.
    pub horizon: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            indicators: IndicatorConfig::default(),
            volume_z_window: 60,
            horizon: 1,
        }
    }
}

/// Aligned per-bar features and the prediction target.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub columns: Vec<FeatureColumn>,
    /// `target[t]` is `ln(C[t+h] / C[t+h-1])`; masked on the last `h` rows.
    pub target: Vec<Option<f64>>,
    pub horizon: usize,
}

pub const BASE_FEATURES: [&str; 5] = [
    "logret_open",
    "logret_high",
    "logret_low",
    "logret_close",
    "volz",
];

impl FeatureMatrix {
    /// Base features plus the listed families (duplicates ignored, order kept).
    pub fn build(
        series: &BarSeries,
        families: &[IndicatorFamily],
        cfg: &FeatureConfig,
    ) -> Result<Self> {
        cfg.indicators.validate()?;
        if cfg.horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be >= 1".to_string()));
        }
        let n = series.len();
        let mut columns = Vec::new();
        for field in PriceField::ALL {
            let r = log_returns(series, field)?;
            let values = core::iter::once(None)
                .chain(r.values.into_iter().map(Some))
                .collect();
            columns.push(FeatureColumn::new(
                alloc::format!("logret_{}", field.name()),
                values,
            ));
        }
        columns.push(FeatureColumn::new(
            "volz",
            volume_zscore(series, cfg.volume_z_window)?.values,
        ));

        let mut seen = Vec::new();
        for &family in families {
            if seen.contains(&family) {
                continue;
            }
            seen.push(family);
            columns.extend(family.columns(series, &cfg.indicators)?);
        }

        let closes = series.closes();
        let h = cfg.horizon;
        let target = (0..n)
            .map(|t| (t + h < n).then(|| libm::log(closes[t + h] / closes[t + h - 1])))
            .collect();
        Ok(Self {
            columns,
            target,
            horizon: h,
        })
    }

    pub fn rows(&self) -> usize {
        self.target.len()
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    /// Rows with every feature and the target present, in order.
    pub fn complete_rows(&self) -> Vec<usize> {
        (0..self.rows())
            .filter(|&t| {
                self.target[t].is_some() && self.columns.iter().all(|c| c.values[t].is_some())
            })
            .collect()
    }

    pub fn feature_row(&self, t: usize) -> Option<Vec<f64>> {
        self.columns.iter().map(|c| c.values[t]).collect()
    }

    /// Dense design matrix and targets for the given rows. Every row must be
    /// complete.
    pub fn design(&self, rows: &[usize]) -> Result<(Matrix, Vec<f64>)> {
        let p = self.columns.len();
        let mut data = Vec::with_capacity(rows.len() * p);
        let mut y = Vec::with_capacity(rows.len());
        for &t in rows {
            let incomplete = || Error::InvalidParameter(alloc::format!("row {t} has masked cells"));
            for c in &self.columns {
                data.push(c.values[t].ok_or_else(incomplete)?);
            }
            y.push(self.target[t].ok_or_else(incomplete)?);
        }
        Ok((Matrix::new(data, rows.len(), p)?, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{MinuteBar, Timestamp};

    fn series(n: usize) -> BarSeries {
        let bars = (0..n)
            .map(|i| {
                let c = 100.0 + (i as f64 * 0.7).sin();
                MinuteBar {
                    timestamp: Timestamp::new(i as i64 * 60, 0),
                    open: c,
                    high: c + 0.2,
                    low: c - 0.2,
                    close: c,
                    volume: 1000.0 + (i % 7) as f64 * 10.0,
                }
            })
            .collect();
        BarSeries::new("T", bars).unwrap()
    }

    #[test]
    fn base_matrix_has_five_columns() {
        let fm = FeatureMatrix::build(&series(200), &[], &FeatureConfig::default()).unwrap();
        assert_eq!(fm.feature_names(), BASE_FEATURES);
        let rows = fm.complete_rows();
        assert_eq!(rows.first(), Some(&59));
        assert_eq!(rows.last(), Some(&198));
    }

    #[test]
    fn target_is_next_close_return() {
        let s = series(100);
        let fm = FeatureMatrix::build(&s, &[], &FeatureConfig::default()).unwrap();
        let c = s.closes();
        assert_eq!(fm.target[10], Some((c[11] / c[10]).ln()));
        assert_eq!(fm.target[99], None);
        // the target at t is the close log-return feature at t + 1
        assert_eq!(fm.target[10], fm.columns[3].values[11]);
    }

    #[test]
    fn family_names_round_trip() {
        for f in IndicatorFamily::ALL {
            assert_eq!(f.name().parse::<IndicatorFamily>().unwrap(), f);
        }
        assert!(matches!(
            "nope".parse::<IndicatorFamily>(),
            Err(Error::UnknownIndicator(_))
        ));
    }

    #[test]
    fn every_family_builds() {
        let s = series(300);
        let fm =
            FeatureMatrix::build(&s, &IndicatorFamily::ALL, &FeatureConfig::default()).unwrap();
        assert_eq!(fm.columns.len(), 5 + 15);
        assert!(!fm.complete_rows().is_empty());
    }
}
