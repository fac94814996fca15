//! Small numeric helpers shared by the indicator, metric and data modules.

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation (divides by `n`).
pub(crate) fn pop_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64;
    libm::sqrt(var)
}

/// True when every element is bitwise-equal to the first.
///
/// Rounding in `mean` makes a computed deviation of a constant window
/// slightly non-zero, so degenerate windows are detected on the raw values.
pub(crate) fn is_flat(xs: &[f64]) -> bool {
    xs.first().map_or(true, |&first| xs.iter().all(|&x| x == first))
}

/// `ceil(level * n)` with a tolerance so that e.g. `0.05 * 200` lands on 10.
pub(crate) fn tail_count(level: f64, n: usize) -> usize {
    let raw = level * n as f64;
    let k = libm::ceil(raw - 1e-9);
    (k.max(0.0) as usize).min(n)
}
