//! Seeded synthetic minute bars (geometric random walk) and a matching
//! Treasury yield series.

use barforest_core::{BarSeries, MinuteBar};
use chrono::{Datelike, Duration, NaiveDate, TimeZone, Utc, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::minute_of;
use crate::error::{Error, Result};
use crate::io::to_central;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    /// Number of weekdays to generate.
    pub days: usize,
    pub start_date: NaiveDate,
    /// First and last bar of each day, `HH:MM` Central.
    pub open: String,
    pub close: String,
    pub start_price: f64,
    /// Mean of the per-minute log return.
    pub drift: f64,
    /// Standard deviation of the per-minute log return.
    pub volatility: f64,
    pub volume_mean: f64,
    /// AR(1) coefficient of log volume.
    pub volume_persistence: f64,
    pub volume_noise: f64,
    /// Initial yield in percent.
    pub yield_start: f64,
    /// Daily standard deviation of the yield, in percent.
    pub yield_volatility: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            days: 20,
            start_date: NaiveDate::from_ymd_opt(2024, 1, 2).expect("valid date"),
            open: "08:30".into(),
            close: "15:00".into(),
            start_price: 450.0,
            drift: 0.0,
            volatility: 0.0005,
            volume_mean: 50_000.0,
            volume_persistence: 0.8,
            volume_noise: 0.3,
            yield_start: 4.25,
            yield_volatility: 0.03,
            seed: 42,
        }
    }
}

pub struct SynthData {
    pub bars: BarSeries,
    /// `(date, yield in percent)`.
    pub yields: Vec<(NaiveDate, f64)>,
}

fn trading_days(start: NaiveDate, count: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(count);
    let mut d = start;
    while out.len() < count {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d += Duration::days(1);
    }
    out
}

pub fn generate(cfg: &SynthConfig, symbol: &str) -> Result<SynthData> {
    let open = minute_of(&cfg.open)?;
    let close = minute_of(&cfg.close)?;
    if cfg.days == 0 || open > close {
        return Err(Error::Config("synthetic data needs at least one day and open <= close".into()));
    }
    if !(cfg.start_price > 0.0 && cfg.volatility >= 0.0 && cfg.volume_mean > 0.0) {
        return Err(Error::Config("synthetic price, volatility and volume must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut normal = move || -> f64 { rng.sample(StandardNormal) };

    let tz = chrono_tz::America::Chicago;
    let mut bars = Vec::new();
    let mut yields = Vec::new();
    let mut price = cfg.start_price;
    let mut log_vol = 0.0;
    let mut y = cfg.yield_start;
    for day in trading_days(cfg.start_date, cfg.days) {
        yields.push((day, (y * 1e4).round() / 1e4));
        y += cfg.yield_volatility * normal();
        for m in open..=close {
            let local = day
                .and_hms_opt(m / 60, m % 60, 0)
                .expect("minute within a day");
            let Some(at) = tz.from_local_datetime(&local).earliest() else {
                continue;
            };
            let o = price;
            let c = o * (cfg.drift + cfg.volatility * normal()).exp();
            let wick = 0.5 * cfg.volatility;
            let high = o.max(c) * (wick * normal().abs()).exp();
            let low = o.min(c) * (-wick * normal().abs()).exp();
            log_vol = cfg.volume_persistence * log_vol + cfg.volume_noise * normal();
            bars.push(MinuteBar {
                timestamp: to_central(at.with_timezone(&Utc)),
                open: o,
                high,
                low,
                close: c,
                volume: (cfg.volume_mean * log_vol.exp()).round(),
            });
            price = c;
        }
    }
    Ok(SynthData {
        bars: BarSeries::new(symbol, bars)?,
        yields,
    })
}
