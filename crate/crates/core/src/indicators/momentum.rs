//! Oscillators: RSI, stochastic %K/%D, CCI and the directional-movement ratio.

use alloc::vec::Vec;

use super::window::{rolling_max, rolling_min, wilder};
use super::{check_fits, check_window, FeatureColumn};
use crate::data::MinuteBar;
use crate::error::{Error, Result};
use crate::stats;

/// Wilder RSI. Gains and losses are smoothed with `alpha = 1 / window`,
/// seeded with the plain mean of the first `window` changes, so the first
/// value lands on row `window`.
pub fn rsi(bars: &[MinuteBar], window: usize) -> Result<FeatureColumn> {
    check_window("rsi", window)?;
    check_fits(window + 1, bars.len())?;
    let mut gains = alloc::vec![0.0; bars.len()];
    let mut losses = alloc::vec![0.0; bars.len()];
    for t in 1..bars.len() {
        let d = bars[t].close - bars[t - 1].close;
        gains[t] = d.max(0.0);
        losses[t] = (-d).max(0.0);
    }
    let avg_gain = wilder(&gains, 1, window);
    let avg_loss = wilder(&losses, 1, window);
    let values = avg_gain
        .into_iter()
        .zip(avg_loss)
        .map(|(g, l)| Some(rsi_value(g?, l?)))
        .collect();
    Ok(FeatureColumn::new("rsi", values))
}

pub(crate) fn rsi_value(avg_gain: f64, avg_loss: f64) -> f64 {
    match (avg_gain == 0.0, avg_loss == 0.0) {
        (true, true) => 50.0,
        (false, true) => 100.0,
        (true, false) => 0.0,
        (false, false) => 100.0 - 100.0 / (1.0 + avg_gain / avg_loss),
    }
}

/// Stochastic oscillator over bar highs and lows. `%K` is 50 when the
/// window's range is zero; `%D` is the plain mean of the last `d_window`
/// `%K` values.
pub fn stochastic(
    bars: &[MinuteBar],
    k_window: usize,
    d_window: usize,
) -> Result<(FeatureColumn, FeatureColumn)> {
    check_window("stochastic.k", k_window)?;
    check_window("stochastic.d", d_window)?;
    check_fits(k_window + d_window - 1, bars.len())?;
    let highs: Vec<f64> = bars.iter().map(|b| b.high).collect();
    let lows: Vec<f64> = bars.iter().map(|b| b.low).collect();
    let hi = rolling_max(&highs, k_window);
    let lo = rolling_min(&lows, k_window);
    let k: Vec<Option<f64>> = (0..bars.len())
        .map(|t| {
            (t + 1 >= k_window).then(|| {
                if hi[t] == lo[t] {
                    50.0
                } else {
                    100.0 * (bars[t].close - lo[t]) / (hi[t] - lo[t])
                }
            })
        })
        .collect();
    let d = (0..bars.len())
        .map(|t| {
            if t + 2 < k_window + d_window {
                return None;
            }
            let window: Option<Vec<f64>> = k[t + 1 - d_window..=t].iter().copied().collect();
            window.map(|w| stats::mean(&w))
        })
        .collect();
    Ok((
        FeatureColumn::new("stoch_k", k),
        FeatureColumn::new("stoch_d", d),
    ))
}

/// Commodity channel index on the typical price `(H + L + C) / 3`, with
/// mean absolute deviation around the window mean. Zero deviation gives 0.
pub fn cci(bars: &[MinuteBar], window: usize) -> Result<FeatureColumn> {
    check_window("cci", window)?;
    check_fits(window, bars.len())?;
    let typical: Vec<f64> = bars
        .iter()
        .map(|b| (b.high + b.low + b.close) / 3.0)
        .collect();
    let values = (0..bars.len())
        .map(|t| {
            (t + 1 >= window).then(|| {
                let w = &typical[t + 1 - window..=t];
                if stats::is_flat(w) {
                    return 0.0;
                }
                let m = stats::mean(w);
                let mad = w.iter().map(|p| (p - m).abs()).sum::<f64>() / window as f64;
                if mad == 0.0 {
                    0.0
                } else {
                    (typical[t] - m) / (0.015 * mad)
                }
            })
        })
        .collect();
    Ok(FeatureColumn::new("cci", values))
}

/// `|DI+ - DI-| / (DI+ + DI-)` with Wilder-smoothed directional movement and
/// true range; 0 when both indicators vanish. First value at row `window`.
/// Relative tolerance under which up and down moves count as equal.
pub const MOVE_TIE_TOLERANCE: f64 = 1e-12;

pub fn adx(bars: &[MinuteBar], window: usize) -> Result<FeatureColumn> {
    check_window("adx", window)?;
    let needed = window + 2;
    if bars.len() < needed {
        return Err(Error::SeriesTooShort {
            needed,
            got: bars.len(),
        });
    }
    let n = bars.len();
    let mut tr = alloc::vec![0.0; n];
    let mut plus_dm = alloc::vec![0.0; n];
    let mut minus_dm = alloc::vec![0.0; n];
    for t in 1..n {
        let (cur, prev) = (&bars[t], &bars[t - 1]);
        tr[t] = (cur.high - cur.low)
            .max((cur.high - prev.close).abs())
            .max((cur.low - prev.close).abs());
        let up = cur.high - prev.high;
        let down = prev.low - cur.low;
        // Equal moves on decimal prices can differ in the last bit, which
        // would make the tie-break depend on the price scale.
        let tie = (up - down).abs() <= MOVE_TIE_TOLERANCE * cur.high.max(prev.high);
        if !tie && up > down && up > 0.0 {
            plus_dm[t] = up;
        }
        if !tie && down > up && down > 0.0 {
            minus_dm[t] = down;
        }
    }
    let atr = wilder(&tr, 1, window);
    let plus = wilder(&plus_dm, 1, window);
    let minus = wilder(&minus_dm, 1, window);
    let values = (0..n)
        .map(|t| {
            let (atr, p, m) = (atr[t]?, plus[t]?, minus[t]?);
            Some(directional_ratio(atr, p, m))
        })
        .collect();
    Ok(FeatureColumn::new("adx", values))
}

pub(crate) fn directional_ratio(atr: f64, plus_dm: f64, minus_dm: f64) -> f64 {
    if atr == 0.0 {
        return 0.0;
    }
    let di_plus = plus_dm / atr;
    let di_minus = minus_dm / atr;
    let sum = di_plus + di_minus;
    if sum == 0.0 {
        0.0
    } else {
        (di_plus - di_minus).abs() / sum
    }
}
