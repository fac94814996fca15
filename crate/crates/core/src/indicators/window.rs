//! Rolling-window building blocks.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::stats;

/// Trailing max over `xs[t + 1 - w ..= t]` (clipped at 0) via a monotonic deque.
pub(crate) fn rolling_max(xs: &[f64], w: usize) -> Vec<f64> {
    rolling_extreme(xs, w, |a, b| a >= b)
}

pub(crate) fn rolling_min(xs: &[f64], w: usize) -> Vec<f64> {
    rolling_extreme(xs, w, |a, b| a <= b)
}

fn rolling_extreme(xs: &[f64], w: usize, keeps: impl Fn(f64, f64) -> bool) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut dq: VecDeque<usize> = VecDeque::new();
    for (t, &x) in xs.iter().enumerate() {
        while dq.back().is_some_and(|&j| !keeps(xs[j], x)) {
            dq.pop_back();
        }
        dq.push_back(t);
        while dq.front().is_some_and(|&j| j + w <= t) {
            dq.pop_front();
        }
        out.push(xs[dq[0]]);
    }
    out
}

/// Mean over each full trailing window; rows before the first full window
/// are `None`.
pub(crate) fn rolling_mean(xs: &[f64], w: usize) -> Vec<Option<f64>> {
    (0..xs.len())
        .map(|t| (t + 1 >= w).then(|| stats::mean(&xs[t + 1 - w..=t])))
        .collect()
}

/// `e_0 = x_0`, `e_t = e_{t-1} + alpha (x_t - e_{t-1})`.
///
/// The increment form keeps a constant input exactly constant.
pub(crate) fn ema(xs: &[f64], alpha: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut prev = match xs.first() {
        Some(&x) => x,
        None => return out,
    };
    out.push(prev);
    for &x in &xs[1..] {
        prev += alpha * (x - prev);
        out.push(prev);
    }
    out
}

/// Wilder smoothing seeded with the plain mean of `xs[first..first + w]`.
/// Output index `first + w - 1` holds the seed; earlier rows are `None`.
pub(crate) fn wilder(xs: &[f64], first: usize, w: usize) -> Vec<Option<f64>> {
    let mut out = alloc::vec![None; xs.len()];
    let seed_end = first + w;
    if seed_end > xs.len() {
        return out;
    }
    let mut avg = stats::mean(&xs[first..seed_end]);
    out[seed_end - 1] = Some(avg);
    for t in seed_end..xs.len() {
        avg += (xs[t] - avg) / w as f64;
        out[t] = Some(avg);
    }
    out
}
