//! Long-only, minute-by-minute portfolio simulation under a per-minute
//! turnover cap. Trades fill at the bar's close with no costs.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::data::{per_minute_risk_free, MinuteBar, RiskFreeCurve, Timestamp};
use crate::error::{Error, Result};
use crate::signals::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    pub initial_cash: f64,
    /// Largest traded value per minute as a fraction of portfolio value.
    pub turnover_cap: f64,
    pub allow_fractional_shares: bool,
    /// Each trade is sized at this fraction of the cap.
    pub trade_fraction: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            initial_cash: 10_000.0,
            turnover_cap: 0.004,
            allow_fractional_shares: true,
            trade_fraction: 1.0,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_cash > 0.0 && self.initial_cash.is_finite()) {
            return Err(Error::InvalidParameter("initial_cash must be positive".into()));
        }
        if !(self.turnover_cap > 0.0 && self.turnover_cap <= 1.0) {
            return Err(Error::InvalidParameter("turnover_cap must lie in (0, 1]".into()));
        }
        if !(self.trade_fraction > 0.0 && self.trade_fraction <= 1.0) {
            return Err(Error::InvalidParameter("trade_fraction must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortfolioState {
    pub cash: f64,
    pub shares: f64,
    pub minute: usize,
}

impl PortfolioState {
    pub fn value_at(&self, price: f64) -> f64 {
        self.cash + self.shares * price
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TradeSide {
    Buy,
    Sell,
}

/// One buy or sell signal acted on. `skipped` trades had nothing to spend or
/// nothing to sell and moved no value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub timestamp: Timestamp,
    pub side: TradeSide,
    pub shares: f64,
    pub price: f64,
    pub value_traded: f64,
    pub portfolio_value_before: f64,
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquityCurve {
    pub initial_value: f64,
    pub timestamps: Vec<Timestamp>,
    /// Marked-to-close portfolio value after each minute's trade.
    pub values: Vec<f64>,
    /// Simple return of each minute against the previous value (the first
    /// against `initial_value`).
    pub returns: Vec<f64>,
    /// Per-minute risk-free rate aligned with `returns`.
    pub risk_free: Vec<f64>,
}

impl EquityCurve {
    fn from_values(
        initial_value: f64,
        bars: &[MinuteBar],
        values: Vec<f64>,
        curve: &RiskFreeCurve,
    ) -> Result<Self> {
        let mut prev = initial_value;
        let returns = values
            .iter()
            .map(|&v| {
                let r = v / prev - 1.0;
                prev = v;
                r
            })
            .collect();
        let risk_free = bars
            .iter()
            .map(|b| per_minute_risk_free(curve, b.timestamp))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            initial_value,
            timestamps: bars.iter().map(|b| b.timestamp).collect(),
            values,
            returns,
            risk_free,
        })
    }

    pub fn final_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(self.initial_value)
    }

    pub fn total_return(&self) -> f64 {
        self.final_value() / self.initial_value - 1.0
    }

    pub fn excess_returns(&self) -> Vec<f64> {
        self.returns
            .iter()
            .zip(&self.risk_free)
            .map(|(r, f)| r - f)
            .collect()
    }

    /// Values including the starting capital, for drawdown calculations.
    pub fn path(&self) -> Vec<f64> {
        core::iter::once(self.initial_value)
            .chain(self.values.iter().copied())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub equity: EquityCurve,
    pub trades: Vec<TradeRecord>,
    pub final_state: PortfolioState,
}

fn check_prices(bars: &[MinuteBar]) -> Result<()> {
    match bars.iter().position(|b| !(b.close > 0.0 && b.close.is_finite())) {
        Some(index) => Err(Error::NonPositivePrice { index }),
        None => Ok(()),
    }
}

/// Runs the signal stream over `bars` (one signal per bar).
pub fn simulate(
    bars: &[MinuteBar],
    signals: &[Signal],
    config: &SimulationConfig,
    curve: &RiskFreeCurve,
) -> Result<Simulation> {
    config.validate()?;
    if bars.len() != signals.len() {
        return Err(Error::MisalignedSignals {
            bars: bars.len(),
            signals: signals.len(),
        });
    }
    check_prices(bars)?;

    let mut state = PortfolioState {
        cash: config.initial_cash,
        shares: 0.0,
        minute: 0,
    };
    let mut trades = Vec::new();
    let mut values = Vec::with_capacity(bars.len());

    for (t, (bar, &signal)) in bars.iter().zip(signals).enumerate() {
        state.minute = t;
        let price = bar.close;
        let before = state.value_at(price);
        let budget = config.trade_fraction * config.turnover_cap * before;
        let side = match signal {
            Signal::Hold => None,
            Signal::Buy => Some(TradeSide::Buy),
            Signal::Sell => Some(TradeSide::Sell),
        };
        if let Some(side) = side {
            let qty = match side {
                TradeSide::Buy => buy_quantity(&state, price, budget, config),
                TradeSide::Sell => sell_quantity(&state, price, budget, config),
            };
            let value = qty * price;
            match side {
                TradeSide::Buy => {
                    state.cash -= value;
                    state.shares += qty;
                }
                TradeSide::Sell => {
                    state.cash += value;
                    state.shares -= qty;
                }
            }
            trades.push(TradeRecord {
                timestamp: bar.timestamp,
                side,
                shares: qty,
                price,
                value_traded: value,
                portfolio_value_before: before,
                skipped: qty == 0.0,
            });
        }
        values.push(state.value_at(price));
    }

    let equity = EquityCurve::from_values(config.initial_cash, bars, values, curve)?;
    Ok(Simulation {
        equity,
        trades,
        final_state: state,
    })
}

fn buy_quantity(state: &PortfolioState, price: f64, budget: f64, config: &SimulationConfig) -> f64 {
    let spend = state.cash.min(budget);
    if spend <= 0.0 {
        return 0.0;
    }
    let mut qty = spend / price;
    if !config.allow_fractional_shares {
        qty = libm::floor(qty);
    }
    // rounding in qty * price must not overdraw cash
    while qty > 0.0 && qty * price > state.cash {
        qty = if config.allow_fractional_shares {
            libm::nextafter(qty, 0.0)
        } else {
            qty - 1.0
        };
    }
    qty
}

fn sell_quantity(state: &PortfolioState, price: f64, budget: f64, config: &SimulationConfig) -> f64 {
    if state.shares <= 0.0 {
        return 0.0;
    }
    if state.shares * price <= budget {
        return state.shares;
    }
    let mut qty = (budget / price).min(state.shares);
    if !config.allow_fractional_shares {
        qty = libm::floor(qty);
    }
    while qty > 0.0 && qty * price > budget {
        qty = if config.allow_fractional_shares {
            libm::nextafter(qty, 0.0)
        } else {
            qty - 1.0
        };
    }
    qty
}

/// All cash into shares at the first close, held to the end. The turnover
/// cap does not apply to the benchmark.
pub fn buy_and_hold_baseline(
    bars: &[MinuteBar],
    config: &SimulationConfig,
    curve: &RiskFreeCurve,
) -> Result<EquityCurve> {
    config.validate()?;
    let first = bars.first().ok_or(Error::EmptyInput)?;
    check_prices(bars)?;
    let mut shares = config.initial_cash / first.close;
    if !config.allow_fractional_shares {
        shares = libm::floor(shares);
    }
    let cash = config.initial_cash - shares * first.close;
    let values = bars.iter().map(|b| cash.max(0.0) + shares * b.close).collect();
    EquityCurve::from_values(config.initial_cash, bars, values, curve)
}
