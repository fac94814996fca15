//! Technical indicators over minute bars, each returned as a masked column.
//!
//! Every column has one entry per bar. `None` marks warm-up rows (and the
//! few degenerate cases listed per indicator); divide-by-zero cases resolve
//! to the indicator's neutral value instead of NaN.

mod momentum;
mod trend;
mod volume;
pub(crate) mod window;

pub use momentum::{adx, cci, rsi, stochastic, MOVE_TIE_TOLERANCE};
pub use trend::{ema_norm, ichimoku, macd_ratio, sma_norm, Ichimoku};
pub use volume::{bollinger_pctb, fib_retracement, obv, wrobv, FIB_LEVELS};

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One named per-bar feature; `None` cells are masked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

impl FeatureColumn {
    pub fn new(name: impl Into<String>, values: Vec<Option<f64>>) -> Self {
        Self {
            name: name.into(),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_masked(&self, row: usize) -> bool {
        self.values[row].is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MacdParams {
    pub fast: usize,
    pub slow: usize,
    pub signal: usize,
}

impl Default for MacdParams {
    fn default() -> Self {
        Self {
            fast: 12,
            slow: 26,
            signal: 9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BollingerParams {
    pub window: usize,
    pub width: f64,
}

impl Default for BollingerParams {
    fn default() -> Self {
        Self {
            window: 20,
            width: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct StochasticParams {
    pub k_window: usize,
    pub d_window: usize,
}

impl Default for StochasticParams {
    fn default() -> Self {
        Self {
            k_window: 14,
            d_window: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct IchimokuParams {
    pub tenkan: usize,
    pub kijun: usize,
    pub senkou_b: usize,
}

impl Default for IchimokuParams {
    fn default() -> Self {
        Self {
            tenkan: 9,
            kijun: 26,
            senkou_b: 52,
        }
    }
}

/// Window lengths for every indicator family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IndicatorConfig {
    pub sma_window: usize,
    pub ema_window: usize,
    pub macd: MacdParams,
    pub rsi_window: usize,
    pub bollinger: BollingerParams,
    pub stochastic: StochasticParams,
    pub fib_window: usize,
    pub adx_window: usize,
    pub wrobv_window: usize,
    pub cci_window: usize,
    pub ichimoku: IchimokuParams,
}

impl Default for IndicatorConfig {
    fn default() -> Self {
        Self {
            sma_window: 20,
            ema_window: 20,
            macd: MacdParams::default(),
            rsi_window: 14,
            bollinger: BollingerParams::default(),
            stochastic: StochasticParams::default(),
            fib_window: 60,
            adx_window: 14,
            wrobv_window: 60,
            cci_window: 20,
            ichimoku: IchimokuParams::default(),
        }
    }
}

impl IndicatorConfig {
    pub fn validate(&self) -> Result<()> {
        let windows = [
            ("sma", self.sma_window),
            ("ema", self.ema_window),
            ("macd.fast", self.macd.fast),
            ("macd.slow", self.macd.slow),
            ("macd.signal", self.macd.signal),
            ("rsi", self.rsi_window),
            ("bollinger", self.bollinger.window),
            ("stochastic.k", self.stochastic.k_window),
            ("stochastic.d", self.stochastic.d_window),
            ("fib", self.fib_window),
            ("adx", self.adx_window),
            ("wrobv", self.wrobv_window),
            ("cci", self.cci_window),
            ("ichimoku.tenkan", self.ichimoku.tenkan),
            ("ichimoku.kijun", self.ichimoku.kijun),
            ("ichimoku.senkou_b", self.ichimoku.senkou_b),
        ];
        for (name, window) in windows {
            check_window(name, window)?;
        }
        if self.macd.fast >= self.macd.slow {
            return Err(Error::InvalidParameter(alloc::format!(
                "macd fast window {} must be below slow window {}",
                self.macd.fast,
                self.macd.slow
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_window(name: &'static str, window: usize) -> Result<()> {
    if window < 2 {
        Err(Error::InvalidWindow { name, window })
    } else {
        Ok(())
    }
}

pub(crate) fn check_fits(window: usize, len: usize) -> Result<()> {
    if window > len {
        Err(Error::WindowTooLarge { window, len })
    } else {
        Ok(())
    }
}
