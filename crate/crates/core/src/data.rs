//! Minute bars, log returns, volume Z-scores, the risk-free curve, the
//! trading-hours filter and the chronological train/test split.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

pub const MINUTES_PER_DAY: u32 = 1440;
const SECS_PER_DAY: i64 = 86_400;

/// Calendar day counted from 1970-01-01 in the exchange's local (Central) time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Day(pub i32);

/// An instant plus the Central-time UTC offset that was in force at it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Timestamp {
    pub epoch_secs: i64,
    pub offset_secs: i32,
}

impl Timestamp {
    pub fn new(epoch_secs: i64, offset_secs: i32) -> Self {
        Self {
            epoch_secs,
            offset_secs,
        }
    }

    fn local_secs(&self) -> i64 {
        self.epoch_secs + i64::from(self.offset_secs)
    }

    /// Local wall-clock minute of the day, `0..1440`.
    pub fn minute_of_day(&self) -> u32 {
        (self.local_secs().rem_euclid(SECS_PER_DAY) / 60) as u32
    }

    pub fn day(&self) -> Day {
        Day(self.local_secs().div_euclid(SECS_PER_DAY) as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinuteBar {
    pub timestamp: Timestamp,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub volume: f64,
}

impl MinuteBar {
    pub fn price(&self, field: PriceField) -> f64 {
        match field {
            PriceField::Open => self.open,
            PriceField::High => self.high,
            PriceField::Low => self.low,
            PriceField::Close => self.close,
        }
    }

    /// Validates prices and volume; `index` is reported in errors.
    pub fn check(&self, index: usize) -> Result<()> {
        for (field, v) in [
            ("open", self.open),
            ("high", self.high),
            ("low", self.low),
            ("close", self.close),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidValue { field, index });
            }
            if v <= 0.0 {
                return Err(Error::NonPositivePrice { index });
            }
        }
        if !self.volume.is_finite() || self.volume < 0.0 {
            return Err(Error::InvalidValue {
                field: "volume",
                index,
            });
        }
        let in_range = |p: f64| self.low <= p && p <= self.high;
        if !(in_range(self.open) && in_range(self.close)) {
            return Err(Error::OhlcInvariantViolation { index });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriceField {
    Open,
    High,
    Low,
    Close,
}

impl PriceField {
    pub const ALL: [PriceField; 4] = [Self::Open, Self::High, Self::Low, Self::Close];

    pub fn name(self) -> &'static str {
        match self {
            Self::Open => "open",
            Self::High => "high",
            Self::Low => "low",
            Self::Close => "close",
        }
    }
}

/// Validated, strictly time-ordered minute bars for one symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarSeries {
    symbol: String,
    bars: Vec<MinuteBar>,
}

impl BarSeries {
    /// Validates every bar and the timestamp ordering. Errors carry the
    /// zero-based index of the first offending bar.
    pub fn new(symbol: impl Into<String>, bars: Vec<MinuteBar>) -> Result<Self> {
        if bars.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, bar) in bars.iter().enumerate() {
            bar.check(i)?;
            if i > 0 && bar.timestamp.epoch_secs <= bars[i - 1].timestamp.epoch_secs {
                return Err(Error::NonMonotonicTimestamp { index: i });
            }
        }
        Ok(Self {
            symbol: symbol.into(),
            bars,
        })
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn bars(&self) -> &[MinuteBar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn closes(&self) -> Vec<f64> {
        self.bars.iter().map(|b| b.close).collect()
    }

    /// Bars at the given positions, keeping the symbol. Positions must be
    /// increasing.
    pub fn select(&self, rows: &[usize]) -> BarSeries {
        BarSeries {
            symbol: self.symbol.clone(),
            bars: rows.iter().map(|&i| self.bars[i]).collect(),
        }
    }
}

/// Log returns of one price field; `values[i]` belongs to bar `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub field: PriceField,
    pub values: Vec<f64>,
}

pub fn log_returns(series: &BarSeries, field: PriceField) -> Result<ReturnSeries> {
    let bars = series.bars();
    if bars.len() < 2 {
        return Err(Error::SeriesTooShort {
            needed: 2,
            got: bars.len(),
        });
    }
    if let Some(index) = bars.iter().position(|b| !(b.price(field) > 0.0)) {
        return Err(Error::NonPositivePrice { index });
    }
    let values = bars
        .windows(2)
        .map(|w| libm::log(w[1].price(field) / w[0].price(field)))
        .collect();
    Ok(ReturnSeries { field, values })
}

/// Trailing-window volume Z-scores. Entries before the first full window
/// are `None`; a window with zero deviation scores 0.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeZScore {
    pub window: usize,
    pub values: Vec<Option<f64>>,
}

pub fn volume_zscore(series: &BarSeries, window: usize) -> Result<VolumeZScore> {
    if window < 2 {
        return Err(Error::InvalidWindow {
            name: "volume_zscore",
            window,
        });
    }
    let volumes: Vec<f64> = series.bars().iter().map(|b| b.volume).collect();
    if window > volumes.len() {
        return Err(Error::WindowTooLarge {
            window,
            len: volumes.len(),
        });
    }
    let mut values = alloc::vec![None; volumes.len()];
    for t in window - 1..volumes.len() {
        let w = &volumes[t + 1 - window..=t];
        values[t] = Some(if stats::is_flat(w) {
            0.0
        } else {
            (volumes[t] - stats::mean(w)) / stats::pop_std(w)
        });
    }
    Ok(VolumeZScore { window, values })
}

/// How a quoted (annualised, decimal) Treasury yield becomes the daily rate
/// fed into per-minute compounding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YieldConvention {
    /// Divide the quoted yield by 252 trading days.
    #[default]
    #[serde(alias = "annual/252")]
    Annual252,
    /// Use the quoted figure as the daily rate.
    AsGiven,
}

impl YieldConvention {
    pub fn daily_rate(self, quoted: f64) -> f64 {
        match self {
            Self::Annual252 => quoted / 252.0,
            Self::AsGiven => quoted,
        }
    }
}

/// Quoted yields by day (decimal, e.g. `0.0425`), looked up with carry-back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskFreeCurve {
    entries: BTreeMap<Day, f64>,
    convention: YieldConvention,
}

impl RiskFreeCurve {
    pub fn new(
        entries: impl IntoIterator<Item = (Day, f64)>,
        convention: YieldConvention,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (day, y) in entries {
            if !y.is_finite() {
                return Err(Error::InvalidParameter(alloc::format!(
                    "non-finite yield on day {}",
                    day.0
                )));
            }
            if map.insert(day, y).is_some() {
                return Err(Error::InvalidParameter(alloc::format!(
                    "duplicate yield for day {}",
                    day.0
                )));
            }
        }
        Ok(Self {
            entries: map,
            convention,
        })
    }

    /// A curve quoting the same yield on every day.
    pub fn flat(quoted: f64, convention: YieldConvention) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(Day(i32::MIN), quoted);
        Self {
            entries,
            convention,
        }
    }

    pub fn convention(&self) -> YieldConvention {
        self.convention
    }

    pub fn entries(&self) -> impl Iterator<Item = (Day, f64)> + '_ {
        self.entries.iter().map(|(d, y)| (*d, *y))
    }

    /// Daily rate from the latest quote dated on or before `day`.
    pub fn daily_rate(&self, day: Day) -> Result<f64> {
        self.entries
            .range(..=day)
            .next_back()
            .map(|(_, &y)| self.convention.daily_rate(y))
            .ok_or(Error::NoPriorYield { day: day.0 })
    }
}

/// `(1 + r_daily)^(1/1440) - 1` for the trading day containing `t`.
pub fn per_minute_risk_free(curve: &RiskFreeCurve, t: Timestamp) -> Result<f64> {
    let daily = curve.daily_rate(t.day())?;
    Ok(libm::expm1(libm::log1p(daily) / f64::from(MINUTES_PER_DAY)))
}

/// Inclusive wall-clock window, in minutes after local midnight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradingSession {
    pub start_minute: u32,
    pub end_minute: u32,
}

impl Default for TradingSession {
    /// 10:00 to 15:30 Central.
    fn default() -> Self {
        Self {
            start_minute: 10 * 60,
            end_minute: 15 * 60 + 30,
        }
    }
}

impl TradingSession {
    pub fn contains(&self, t: Timestamp) -> bool {
        let m = t.minute_of_day();
        self.start_minute <= m && m <= self.end_minute
    }
}

/// Keeps bars whose local time falls inside `session`. May return an empty
/// series.
pub fn filter_trading_hours(series: &BarSeries, session: TradingSession) -> BarSeries {
    BarSeries {
        symbol: series.symbol.clone(),
        bars: series
            .bars
            .iter()
            .filter(|b| session.contains(b.timestamp))
            .copied()
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSplit {
    pub train: Range<usize>,
    pub test: Range<usize>,
}

/// Unshuffled split: the first `floor(ratio * n)` rows train, the rest test.
pub fn chronological_split(n: usize, ratio: f64) -> Result<DatasetSplit> {
    if n < 2 {
        return Err(Error::SeriesTooShort { needed: 2, got: n });
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidParameter(
            "split ratio must lie in (0, 1)".to_string(),
        ));
    }
    let cut = libm::floor(ratio * n as f64) as usize;
    let cut = cut.clamp(1, n - 1);
    Ok(DatasetSplit {
        train: 0..cut,
        test: cut..n,
    })
}
