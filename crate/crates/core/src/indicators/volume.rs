//! Band and range positions (Bollinger %B, Fibonacci retracement) and the
//! volume-flow indicators (OBV, WROBV).

use alloc::vec::Vec;

use super::window::{rolling_max, rolling_min};
use super::{check_fits, check_window, BollingerParams, FeatureColumn};
use crate::data::MinuteBar;
use crate::error::{Error, Result};
use crate::stats;

pub const FIB_LEVELS: [f64; 5] = [0.236, 0.382, 0.500, 0.618, 0.764];

/// `%B = (C - LBB) / (UBB - LBB)` with bands at `SMA +/- width * sigma`,
/// sigma the population deviation of closes. A flat window gives 0.5.
pub fn bollinger_pctb(bars: &[MinuteBar], params: BollingerParams) -> Result<FeatureColumn> {
    check_window("bollinger", params.window)?;
    if !(params.width > 0.0 && params.width.is_finite()) {
        return Err(Error::InvalidParameter(
            "bollinger width must be positive".into(),
        ));
    }
    check_fits(params.window, bars.len())?;
    let c: Vec<f64> = bars.iter().map(|b| b.close).collect();
    let w = params.window;
    let values = (0..c.len())
        .map(|t| {
            (t + 1 >= w).then(|| {
                let win = &c[t + 1 - w..=t];
                if stats::is_flat(win) {
                    return 0.5;
                }
                let sigma = stats::pop_std(win);
                let mid = stats::mean(win);
                let lower = mid - params.width * sigma;
                let upper = mid + params.width * sigma;
                (c[t] - lower) / (upper - lower)
            })
        })
        .collect();
    Ok(FeatureColumn::new("boll_pctb", values))
}

/// Retracement `R = (H_N - C) / (H_N - L_N)` over bar highs/lows, plus the
/// distance from `R` to the nearest level in [`FIB_LEVELS`]. A zero range
/// gives `R = 0.5`.
pub fn fib_retracement(
    bars: &[MinuteBar],
    window: usize,
) -> Result<(FeatureColumn, FeatureColumn)> {
    check_window("fib", window)?;
    check_fits(window, bars.len())?;
    let highs: Vec<f64> = bars.iter().map(|b| b.high).collect();
    let lows: Vec<f64> = bars.iter().map(|b| b.low).collect();
    let hi = rolling_max(&highs, window);
    let lo = rolling_min(&lows, window);
    let r: Vec<Option<f64>> = (0..bars.len())
        .map(|t| {
            (t + 1 >= window).then(|| {
                if hi[t] == lo[t] {
                    0.5
                } else {
                    (hi[t] - bars[t].close) / (hi[t] - lo[t])
                }
            })
        })
        .collect();
    let dist = r.iter().map(|v| v.map(nearest_level_distance)).collect();
    Ok((
        FeatureColumn::new("fib_r", r),
        FeatureColumn::new("fib_level_dist", dist),
    ))
}

pub(crate) fn nearest_level_distance(r: f64) -> f64 {
    FIB_LEVELS
        .iter()
        .map(|l| (r - l).abs())
        .fold(f64::INFINITY, f64::min)
}

fn obv_values(bars: &[MinuteBar]) -> Vec<f64> {
    let mut out = Vec::with_capacity(bars.len());
    let mut acc = 0.0;
    out.push(acc);
    for w in bars.windows(2) {
        let d = w[1].close - w[0].close;
        if d > 0.0 {
            acc += w[1].volume;
        } else if d < 0.0 {
            acc -= w[1].volume;
        }
        out.push(acc);
    }
    out
}

/// On-balance volume starting at 0; unchanged closes add nothing.
pub fn obv(bars: &[MinuteBar]) -> Result<FeatureColumn> {
    if bars.len() < 2 {
        return Err(Error::SeriesTooShort {
            needed: 2,
            got: bars.len(),
        });
    }
    Ok(FeatureColumn::new(
        "obv",
        obv_values(bars).into_iter().map(Some).collect(),
    ))
}

/// Window sum of OBV over window sum of volume. Windows with zero volume
/// are masked.
pub fn wrobv(bars: &[MinuteBar], window: usize) -> Result<FeatureColumn> {
    check_window("wrobv", window)?;
    check_fits(window, bars.len())?;
    let obv = obv_values(bars);
    let values = (0..bars.len())
        .map(|t| {
            if t + 1 < window {
                return None;
            }
            let lo = t + 1 - window;
            let vol: f64 = bars[lo..=t].iter().map(|b| b.volume).sum();
            (vol != 0.0).then(|| obv[lo..=t].iter().sum::<f64>() / vol)
        })
        .collect();
    Ok(FeatureColumn::new("wrobv", values))
}
