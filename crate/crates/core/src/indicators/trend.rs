//! Moving-average family: SMA and EMA ratios, the MACD ratio and Ichimoku.

use alloc::vec::Vec;

use super::window::{ema, rolling_max, rolling_mean, rolling_min};
use super::{check_fits, check_window, FeatureColumn, IchimokuParams, MacdParams};
use crate::data::MinuteBar;
use crate::error::{Error, Result};

fn closes(bars: &[MinuteBar]) -> Vec<f64> {
    bars.iter().map(|b| b.close).collect()
}

/// `C_t / SMA_N(C)_t`; the first `N - 1` rows are masked.
pub fn sma_norm(bars: &[MinuteBar], window: usize) -> Result<FeatureColumn> {
    check_window("sma", window)?;
    check_fits(window, bars.len())?;
    let c = closes(bars);
    let values = rolling_mean(&c, window)
        .into_iter()
        .zip(&c)
        .map(|(m, &close)| m.map(|m| close / m))
        .collect();
    Ok(FeatureColumn::new("sma_norm", values))
}

/// `C_t / EMA_t` with `alpha = 2 / (N + 1)`, seeded at the first close.
/// The first `N - 1` rows are masked as warm-up.
pub fn ema_norm(bars: &[MinuteBar], window: usize) -> Result<FeatureColumn> {
    check_window("ema", window)?;
    check_fits(window, bars.len())?;
    let c = closes(bars);
    let e = ema(&c, 2.0 / (window as f64 + 1.0));
    let values = c
        .iter()
        .zip(&e)
        .enumerate()
        .map(|(t, (close, avg))| (t + 1 >= window).then(|| close / avg))
        .collect();
    Ok(FeatureColumn::new("ema_norm", values))
}

/// `(MACD - SIG) / (0.5 (|MACD| + |SIG|))`, 0 when both lines are 0.
///
/// Both EMAs seed from the first close and the signal line seeds from the
/// first MACD value; rows before `slow + signal - 2` are masked.
pub fn macd_ratio(bars: &[MinuteBar], params: MacdParams) -> Result<FeatureColumn> {
    check_window("macd.fast", params.fast)?;
    check_window("macd.slow", params.slow)?;
    check_window("macd.signal", params.signal)?;
    if params.fast >= params.slow {
        return Err(Error::InvalidParameter(alloc::format!(
            "macd fast window {} must be below slow window {}",
            params.fast,
            params.slow
        )));
    }
    let warmup = params.slow + params.signal - 2;
    check_fits(warmup + 1, bars.len())?;
    let c = closes(bars);
    let fast = ema(&c, 2.0 / (params.fast as f64 + 1.0));
    let slow = ema(&c, 2.0 / (params.slow as f64 + 1.0));
    let macd: Vec<f64> = fast.iter().zip(&slow).map(|(f, s)| f - s).collect();
    let sig = ema(&macd, 2.0 / (params.signal as f64 + 1.0));
    let values = macd
        .iter()
        .zip(&sig)
        .enumerate()
        .map(|(t, (&m, &s))| (t >= warmup).then(|| normalized_gap(m, s)))
        .collect();
    Ok(FeatureColumn::new("macd_ratio", values))
}

pub(crate) fn normalized_gap(macd: f64, signal: f64) -> f64 {
    let denom = 0.5 * (macd.abs() + signal.abs());
    if denom == 0.0 {
        0.0
    } else {
        (macd - signal) / denom
    }
}

/// The five Ichimoku lines. Only the leading spans are used as features;
/// `chikou` at row `t` is the close `kijun` rows later and so is masked on
/// the last `kijun` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Ichimoku {
    pub tenkan: FeatureColumn,
    pub kijun: FeatureColumn,
    pub senkou_a: FeatureColumn,
    pub senkou_b: FeatureColumn,
    pub chikou: FeatureColumn,
}

fn midpoint_line(bars: &[MinuteBar], window: usize) -> Vec<Option<f64>> {
    let highs: Vec<f64> = bars.iter().map(|b| b.high).collect();
    let lows: Vec<f64> = bars.iter().map(|b| b.low).collect();
    let hi = rolling_max(&highs, window);
    let lo = rolling_min(&lows, window);
    (0..bars.len())
        .map(|t| (t + 1 >= window).then(|| (hi[t] + lo[t]) / 2.0))
        .collect()
}

/// Leading spans at row `t` are built from data at row `t - kijun`, so no
/// row reads a later bar.
pub fn ichimoku(bars: &[MinuteBar], params: IchimokuParams) -> Result<Ichimoku> {
    check_window("ichimoku.tenkan", params.tenkan)?;
    check_window("ichimoku.kijun", params.kijun)?;
    check_window("ichimoku.senkou_b", params.senkou_b)?;
    let needed = params.senkou_b + params.kijun + 1;
    if bars.len() < needed {
        return Err(Error::SeriesTooShort {
            needed,
            got: bars.len(),
        });
    }
    let n = bars.len();
    let shift = params.kijun;
    let tenkan = midpoint_line(bars, params.tenkan);
    let kijun = midpoint_line(bars, params.kijun);
    let span_b_base = midpoint_line(bars, params.senkou_b);

    let lagged = |t: usize, line: &dyn Fn(usize) -> Option<f64>| {
        t.checked_sub(shift).and_then(line)
    };
    let senkou_a = (0..n)
        .map(|t| lagged(t, &|s| Some((tenkan[s]? + kijun[s]?) / 2.0)))
        .collect();
    let senkou_b = (0..n).map(|t| lagged(t, &|s| span_b_base[s])).collect();
    let chikou = (0..n)
        .map(|t| bars.get(t + shift).map(|b| b.close))
        .collect();

    Ok(Ichimoku {
        tenkan: FeatureColumn::new("ichimoku_tenkan", tenkan),
        kijun: FeatureColumn::new("ichimoku_kijun", kijun),
        senkou_a: FeatureColumn::new("ichimoku_senkou_a", senkou_a),
        senkou_b: FeatureColumn::new("ichimoku_senkou_b", senkou_b),
        chikou: FeatureColumn::new("ichimoku_chikou", chikou),
    })
}
