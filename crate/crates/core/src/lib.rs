//! Minute-bar feature engineering, random-forest return prediction, quantile
//! signals, turnover-capped simulation and risk-reward metrics.
//!
//! The crate is `no_std` with `alloc`; file formats, the command line and
//! thread pools live in the companion `barforest` crate. Enable the `std`
//! feature to get `std::error::Error` on [`Error`].

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod data;
pub mod error;
pub mod experiment;
pub mod features;
pub mod forest;
pub mod indicators;
pub mod metrics;
pub mod signals;
pub mod simulator;
mod stats;

pub use data::{
    chronological_split, filter_trading_hours, log_returns, per_minute_risk_free, volume_zscore,
    BarSeries, DatasetSplit, Day, MinuteBar, PriceField, ReturnSeries, RiskFreeCurve, Timestamp,
    TradingSession, VolumeZScore, YieldConvention,
};
pub use error::{Error, Result};
pub use features::{FeatureColumn, FeatureConfig, FeatureMatrix, IndicatorFamily};
pub use forest::{ForestModel, ForestParams, ImportanceReport, MaxFeatures, OobScore};
pub use indicators::IndicatorConfig;
pub use signals::{Signal, SignalThresholds, TiePolicy};
pub use simulator::{EquityCurve, PortfolioState, SimulationConfig, TradeRecord, TradeSide};
