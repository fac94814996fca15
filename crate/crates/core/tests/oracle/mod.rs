//! Naive reference implementations used as test oracles, plus random input
//! generators. Each oracle recomputes its quantity directly from the
//! definition (full window scans, closed-form sums, sort-and-average) with
//! no shared code from the library.

#![allow(dead_code)]

use barforest_core::{BarSeries, MinuteBar, Timestamp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random-walk bars rounded to cents with occasional flat stretches, so ties
/// and zero-range windows occur.
pub fn random_bars(rng: &mut ChaCha8Rng, n: usize) -> Vec<MinuteBar> {
    let mut price: f64 = rng.random_range(20.0..500.0);
    let flat_start = rng.random_range(0..n);
    let flat_len = rng.random_range(0..40);
    let cents = |x: f64| (x * 100.0).round() / 100.0;
    (0..n)
        .map(|i| {
            let ts = Timestamp::new(1_700_000_000 + 60 * i as i64, -6 * 3600);
            if i >= flat_start && i < flat_start + flat_len {
                let p = cents(price);
                return MinuteBar {
                    timestamp: ts,
                    open: p,
                    high: p,
                    low: p,
                    close: p,
                    volume: 0.0,
                };
            }
            let open = cents(price);
            price *= 1.0 + rng.random_range(-0.004..0.004);
            let close = cents(price).max(0.01);
            let high = cents(open.max(close) * (1.0 + rng.random_range(0.0..0.002)));
            let low = cents(open.min(close) * (1.0 - rng.random_range(0.0..0.002))).max(0.01);
            MinuteBar {
                timestamp: ts,
                open,
                high,
                low,
                close,
                volume: f64::from(rng.random_range(0u32..5000)),
            }
        })
        .collect()
}

pub fn random_series(rng: &mut ChaCha8Rng, n: usize) -> BarSeries {
    BarSeries::new("TEST", random_bars(rng, n)).unwrap()
}

pub fn scale_prices(bars: &[MinuteBar], lambda: f64) -> Vec<MinuteBar> {
    bars.iter()
        .map(|b| MinuteBar {
            open: b.open * lambda,
            high: b.high * lambda,
            low: b.low * lambda,
            close: b.close * lambda,
            ..*b
        })
        .collect()
}

fn closes(bars: &[MinuteBar]) -> Vec<f64> {
    bars.iter().map(|b| b.close).collect()
}

fn all_equal(xs: &[f64]) -> bool {
    xs.iter().all(|x| *x == xs[0])
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn pop_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

fn max_in(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::MIN, f64::max)
}

fn min_in(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::MAX, f64::min)
}

/// `EMA_t = (1-a)^t x_0 + sum_{j=1..t} a (1-a)^(t-j) x_j`, evaluated directly.
pub fn ema_closed_form(xs: &[f64], alpha: f64) -> Vec<f64> {
    (0..xs.len())
        .map(|t| {
            let mut v = (1.0 - alpha).powi(t as i32) * xs[0];
            for j in 1..=t {
                v += alpha * (1.0 - alpha).powi((t - j) as i32) * xs[j];
            }
            v
        })
        .collect()
}

/// Wilder average of `xs[1..]`: the first value is the plain mean of
/// `xs[1..=w]` at row `w`, then `(prev (w - 1) + x) / w`.
fn wilder_average(xs: &[f64], w: usize) -> Vec<Option<f64>> {
    let mut out = vec![None; xs.len()];
    if xs.len() <= w {
        return out;
    }
    let mut avg = xs[1..=w].iter().sum::<f64>() / w as f64;
    out[w] = Some(avg);
    for t in w + 1..xs.len() {
        avg = (avg * (w as f64 - 1.0) + xs[t]) / w as f64;
        out[t] = Some(avg);
    }
    out
}

pub fn log_returns(bars: &[MinuteBar]) -> Vec<f64> {
    bars.windows(2).map(|w| (w[1].close / w[0].close).ln()).collect()
}

pub fn volume_z(bars: &[MinuteBar], w: usize) -> Vec<Option<f64>> {
    let v: Vec<f64> = bars.iter().map(|b| b.volume).collect();
    (0..v.len())
        .map(|t| {
            if t + 1 < w {
                return None;
            }
            let win = &v[t + 1 - w..=t];
            if all_equal(win) {
                return Some(0.0);
            }
            Some((v[t] - mean(win)) / pop_std(win))
        })
        .collect()
}

pub fn sma_norm(bars: &[MinuteBar], w: usize) -> Vec<Option<f64>> {
    let c = closes(bars);
    (0..c.len())
        .map(|t| (t + 1 >= w).then(|| c[t] / mean(&c[t + 1 - w..=t])))
        .collect()
}

pub fn ema_norm(bars: &[MinuteBar], w: usize) -> Vec<Option<f64>> {
    let c = closes(bars);
    let e = ema_closed_form(&c, 2.0 / (w as f64 + 1.0));
    (0..c.len()).map(|t| (t + 1 >= w).then(|| c[t] / e[t])).collect()
}

pub fn macd_ratio(bars: &[MinuteBar], fast: usize, slow: usize, signal: usize) -> Vec<Option<f64>> {
    let c = closes(bars);
    let f = ema_closed_form(&c, 2.0 / (fast as f64 + 1.0));
    let s = ema_closed_form(&c, 2.0 / (slow as f64 + 1.0));
    let macd: Vec<f64> = f.iter().zip(&s).map(|(a, b)| a - b).collect();
    let sig = ema_closed_form(&macd, 2.0 / (signal as f64 + 1.0));
    (0..c.len())
        .map(|t| {
            (t + 2 >= slow + signal).then(|| {
                let d = 0.5 * (macd[t].abs() + sig[t].abs());
                if d == 0.0 {
                    0.0
                } else {
                    (macd[t] - sig[t]) / d
                }
            })
        })
        .collect()
}

pub fn rsi(bars: &[MinuteBar], w: usize) -> Vec<Option<f64>> {
    let c = closes(bars);
    let mut gains = vec![0.0; c.len()];
    let mut losses = vec![0.0; c.len()];
    for t in 1..c.len() {
        gains[t] = (c[t] - c[t - 1]).max(0.0);
        losses[t] = (c[t - 1] - c[t]).max(0.0);
    }
    let g = wilder_average(&gains, w);
    let l = wilder_average(&losses, w);
    g.iter()
        .zip(&l)
        .map(|(g, l)| {
            let (g, l) = ((*g)?, (*l)?);
            Some(if g == 0.0 && l == 0.0 {
                50.0
            } else if l == 0.0 {
                100.0
            } else if g == 0.0 {
                0.0
            } else {
                100.0 - 100.0 / (1.0 + g / l)
            })
        })
        .collect()
}

pub fn bollinger_pctb(bars: &[MinuteBar], w: usize, width: f64) -> Vec<Option<f64>> {
    let c = closes(bars);
    (0..c.len())
        .map(|t| {
            if t + 1 < w {
                return None;
            }
            let win = &c[t + 1 - w..=t];
            if all_equal(win) {
                return Some(0.5);
            }
            let (m, s) = (mean(win), pop_std(win));
            Some((c[t] - (m - width * s)) / (2.0 * width * s))
        })
        .collect()
}

fn range_hl(bars: &[MinuteBar], t: usize, w: usize) -> (f64, f64) {
    let win = &bars[t + 1 - w..=t];
    let highs: Vec<f64> = win.iter().map(|b| b.high).collect();
    let lows: Vec<f64> = win.iter().map(|b| b.low).collect();
    (max_in(&highs), min_in(&lows))
}

pub fn stoch_k(bars: &[MinuteBar], k: usize) -> Vec<Option<f64>> {
    (0..bars.len())
        .map(|t| {
            if t + 1 < k {
                return None;
            }
            let (h, l) = range_hl(bars, t, k);
            Some(if h == l {
                50.0
            } else {
                100.0 * (bars[t].close - l) / (h - l)
            })
        })
        .collect()
}

pub fn stoch_d(bars: &[MinuteBar], k: usize, d: usize) -> Vec<Option<f64>> {
    let kv = stoch_k(bars, k);
    (0..bars.len())
        .map(|t| {
            if t + 1 < d {
                return None;
            }
            let win: Option<Vec<f64>> = kv[t + 1 - d..=t].iter().copied().collect();
            win.map(|w| mean(&w))
        })
        .collect()
}

pub fn fib_r(bars: &[MinuteBar], w: usize) -> Vec<Option<f64>> {
    (0..bars.len())
        .map(|t| {
            if t + 1 < w {
                return None;
            }
            let (h, l) = range_hl(bars, t, w);
            Some(if h == l { 0.5 } else { (h - bars[t].close) / (h - l) })
        })
        .collect()
}

pub fn fib_level_dist(bars: &[MinuteBar], w: usize) -> Vec<Option<f64>> {
    fib_r(bars, w)
        .into_iter()
        .map(|r| {
            r.map(|r| {
                [0.236, 0.382, 0.5, 0.618, 0.764]
                    .iter()
                    .map(|l| (r - l).abs())
                    .fold(f64::MAX, f64::min)
            })
        })
        .collect()
}

pub fn adx(bars: &[MinuteBar], w: usize) -> Vec<Option<f64>> {
    let n = bars.len();
    let mut tr = vec![0.0; n];
    let mut pdm = vec![0.0; n];
    let mut mdm = vec![0.0; n];
    for t in 1..n {
        let (b, p) = (&bars[t], &bars[t - 1]);
        tr[t] = max_in(&[b.high - b.low, (b.high - p.close).abs(), (b.low - p.close).abs()]);
        let up = b.high - p.high;
        let down = p.low - b.low;
        // moves equal up to rounding are ties and count for neither side
        let tie = (up - down).abs() <= 1e-12 * b.high.max(p.high);
        pdm[t] = if !tie && up > down && up > 0.0 { up } else { 0.0 };
        mdm[t] = if !tie && down > up && down > 0.0 { down } else { 0.0 };
    }
    let (a, p, m) = (
        wilder_average(&tr, w),
        wilder_average(&pdm, w),
        wilder_average(&mdm, w),
    );
    (0..n)
        .map(|t| {
            let (a, p, m) = (a[t]?, p[t]?, m[t]?);
            if a == 0.0 {
                return Some(0.0);
            }
            let (dp, dm) = (p / a, m / a);
            Some(if dp + dm == 0.0 {
                0.0
            } else {
                (dp - dm).abs() / (dp + dm)
            })
        })
        .collect()
}

pub fn obv(bars: &[MinuteBar]) -> Vec<f64> {
    (0..bars.len())
        .map(|t| {
            (1..=t)
                .map(|i| {
                    let d = bars[i].close - bars[i - 1].close;
                    if d > 0.0 {
                        bars[i].volume
                    } else if d < 0.0 {
                        -bars[i].volume
                    } else {
                        0.0
                    }
                })
                .sum()
        })
        .collect()
}

pub fn wrobv(bars: &[MinuteBar], w: usize) -> Vec<Option<f64>> {
    let o = obv(bars);
    (0..bars.len())
        .map(|t| {
            if t + 1 < w {
                return None;
            }
            let vol: f64 = bars[t + 1 - w..=t].iter().map(|b| b.volume).sum();
            (vol != 0.0).then(|| o[t + 1 - w..=t].iter().sum::<f64>() / vol)
        })
        .collect()
}

pub fn cci(bars: &[MinuteBar], w: usize) -> Vec<Option<f64>> {
    let p: Vec<f64> = bars.iter().map(|b| (b.high + b.low + b.close) / 3.0).collect();
    (0..p.len())
        .map(|t| {
            if t + 1 < w {
                return None;
            }
            let win = &p[t + 1 - w..=t];
            if all_equal(win) {
                return Some(0.0);
            }
            let m = mean(win);
            let mad = win.iter().map(|x| (x - m).abs()).sum::<f64>() / w as f64;
            Some((p[t] - m) / (0.015 * mad))
        })
        .collect()
}

fn midpoint(bars: &[MinuteBar], w: usize) -> Vec<Option<f64>> {
    (0..bars.len())
        .map(|t| {
            (t + 1 >= w).then(|| {
                let (h, l) = range_hl(bars, t, w);
                (h + l) / 2.0
            })
        })
        .collect()
}

/// `(tenkan, kijun, senkou_a, senkou_b, chikou)`.
pub fn ichimoku(
    bars: &[MinuteBar],
    tenkan: usize,
    kijun: usize,
    senkou_b: usize,
) -> [Vec<Option<f64>>; 5] {
    let n = bars.len();
    let tk = midpoint(bars, tenkan);
    let kj = midpoint(bars, kijun);
    let sb = midpoint(bars, senkou_b);
    let lead_a = (0..n)
        .map(|t| {
            let s = t.checked_sub(kijun)?;
            Some((tk[s]? + kj[s]?) / 2.0)
        })
        .collect();
    let lead_b = (0..n).map(|t| sb[t.checked_sub(kijun)?]).collect();
    let chikou = (0..n).map(|t| bars.get(t + kijun).map(|b| b.close)).collect();
    [tk, kj, lead_a, lead_b, chikou]
}

/// Largest absolute difference, or `None` when the masks disagree.
pub fn max_abs_diff(a: &[Option<f64>], b: &[Option<f64>]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut worst = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        match (x, y) {
            (Some(x), Some(y)) => worst = worst.max((x - y).abs()),
            (None, None) => {}
            _ => return None,
        }
    }
    Some(worst)
}

// Tail-metric oracles: sort the whole sample, average explicit index ranges.

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut s = xs.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s
}

/// Tail size `ceil(level * n)`, computed with integer arithmetic on the
/// level expressed in basis points.
pub fn tail_size(level_bp: u64, n: usize) -> usize {
    ((level_bp * n as u64).div_ceil(10_000)) as usize
}

fn bottom_mean(xs: &[f64], k: usize) -> f64 {
    let s = sorted(xs);
    s[..k].iter().sum::<f64>() / k as f64
}

fn top_mean(xs: &[f64], k: usize) -> f64 {
    let s = sorted(xs);
    s[s.len() - k..].iter().sum::<f64>() / k as f64
}

pub fn rachev(xs: &[f64], beta_bp: u64, gamma_bp: u64) -> f64 {
    top_mean(xs, tail_size(gamma_bp, xs.len())) / bottom_mean(xs, tail_size(beta_bp, xs.len())).abs()
}

pub fn modified_rachev(xs: &[f64], delta_bp: u64, epsilon: f64, gamma: f64) -> f64 {
    let k = tail_size(delta_bp, xs.len());
    (top_mean(xs, k) / epsilon) / (bottom_mean(xs, k).abs() / gamma)
}

pub fn gain_loss(xs: &[f64]) -> f64 {
    let pos: Vec<f64> = xs.iter().copied().filter(|x| *x > 0.0).collect();
    let neg: Vec<f64> = xs.iter().copied().filter(|x| *x < 0.0).collect();
    mean(&pos) / mean(&neg).abs()
}

pub fn star(xs: &[f64], rf: &[f64], alpha_bp: u64) -> f64 {
    let excess: Vec<f64> = xs.iter().zip(rf).map(|(x, f)| x - f).collect();
    mean(&excess) / bottom_mean(xs, tail_size(alpha_bp, xs.len())).abs()
}

pub fn gini(xs: &[f64]) -> f64 {
    let s = sorted(xs);
    let n = s.len() as f64;
    let num: f64 = s
        .iter()
        .enumerate()
        .map(|(i, x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x)
        .sum();
    num / (n * s.iter().sum::<f64>())
}

/// Checks every (peak, later trough) pair on short inputs; longer inputs
/// compare each value with the maximum of everything before it.
pub fn max_drawdown(values: &[f64]) -> f64 {
    if values.len() > 1500 {
        let mut peaks = Vec::with_capacity(values.len());
        for (j, v) in values.iter().enumerate() {
            peaks.push(if j == 0 { *v } else { v.max(peaks[j - 1]) });
        }
        return values
            .iter()
            .zip(&peaks)
            .map(|(v, p)| (p - v) / p)
            .fold(0.0, f64::max);
    }
    let mut worst = 0.0f64;
    for i in 0..values.len() {
        for j in i..values.len() {
            worst = worst.max((values[i] - values[j]) / values[i]);
        }
    }
    worst
}

/// Weighted tail ratio; position `i` in a tail of size `k` (0 = most extreme)
/// gets weight `w((i + 0.5) / k)`.
pub fn distortion_rrr(xs: &[f64], beta_bp: u64, w: impl Fn(f64) -> f64) -> f64 {
    let s = sorted(xs);
    let k = tail_size(beta_bp, xs.len());
    let weighted = |tail: Vec<f64>| {
        let ws: Vec<f64> = (0..k).map(|i| w((i as f64 + 0.5) / k as f64)).collect();
        tail.iter().zip(&ws).map(|(x, w)| x * w).sum::<f64>() / ws.iter().sum::<f64>()
    };
    let upper = weighted(s[s.len() - k..].iter().rev().copied().collect());
    let lower = weighted(s[..k].to_vec());
    upper / lower.abs()
}

/// Returns drawn around zero with a heavier left tail, rounded nowhere, so
/// ties only occur by chance.
pub fn random_returns(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random_range(-1.0..1.0);
            let scale = if u < 0.0 { 1.5e-3 } else { 1e-3 };
            u * scale + rng.random_range(-2e-5..4e-5)
        })
        .collect()
}

/// Relative comparison that degrades to absolute near zero.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}
