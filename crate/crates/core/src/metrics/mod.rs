//! Prediction accuracy and risk-reward metrics.
//!
//! Standard deviations are population deviations throughout, and Sharpe and
//! Sortino are per-minute figures (not annualised). Tail means use empirical
//! order statistics: the lower tail at level `b` is the lowest `ceil(b N)`
//! observations and the upper tail at level `g` the highest `ceil(g N)`.

mod prediction;
mod risk;

pub use prediction::{correlation, mae, r2, rmse, trend_accuracy, PredictionMetrics};
pub use risk::{
    distortion_rrr, gain_loss, gini, lower_tail_mean, max_drawdown, minimax, modified_rachev,
    rachev, sharpe, sortino, star, upper_tail_mean, Distortion, IdentityDistortion, RiskReport,
    TailParams,
};
