//! One model configuration run end to end: features, forest, thresholds,
//! signals, simulation and metrics. File handling and parallelism live in
//! the `barforest` crate.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::data::{chronological_split, BarSeries, DatasetSplit, RiskFreeCurve};
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, FeatureMatrix, IndicatorFamily};
use crate::forest::{ForestModel, ForestParams, ImportanceReport, Matrix, OobScore};
use crate::indicators::IndicatorConfig;
use crate::metrics::{PredictionMetrics, RiskReport, TailParams};
use crate::signals::{Signal, SignalThresholds, TiePolicy};
use crate::simulator::{buy_and_hold_baseline, simulate, EquityCurve, Simulation, SimulationConfig};

/// A named feature set plus optional overrides of the run-wide settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub name: String,
    #[serde(default)]
    pub label: Option<String>,
    /// Empty for the price/volume-only model.
    #[serde(default)]
    pub indicators: Vec<IndicatorFamily>,
    #[serde(default)]
    pub indicator_config: Option<IndicatorConfig>,
    #[serde(default)]
    pub forest: Option<ForestParams>,
    #[serde(default)]
    pub simulation: Option<SimulationConfig>,
    #[serde(default)]
    pub horizon: Option<usize>,
}

impl ModelConfig {
    pub fn new(name: impl Into<String>, indicators: Vec<IndicatorFamily>) -> Self {
        Self {
            name: name.into(),
            label: None,
            indicators,
            indicator_config: None,
            forest: None,
            simulation: None,
            horizon: None,
        }
    }

    pub fn display_name(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.name)
    }
}

pub const BASE_MODEL: &str = "rfr_base";

/// The thirteen standard configurations: the base model, one model per
/// indicator family except OBV, and the RSI + EMA + Bollinger hybrid.
pub fn builtin_configs() -> Vec<ModelConfig> {
    use IndicatorFamily::*;
    let mut out = Vec::with_capacity(13);
    let mut base = ModelConfig::new(BASE_MODEL, Vec::new());
    base.label = Some("RFR (no indicators)".to_string());
    out.push(base);
    for family in [
        Bollinger, Ema, Rsi, Macd, Wrobv, Ichimoku, Adx, Cci, Stochastic, Sma, Fibonacci,
    ] {
        out.push(ModelConfig::new(
            alloc::format!("rfr_{}", family.name()),
            alloc::vec![family],
        ));
    }
    out.push(ModelConfig::new(
        "rfr_hybrid_rsi_ema_boll",
        alloc::vec![Rsi, Ema, Bollinger],
    ));
    out
}

/// Settings shared by every model in a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub split_ratio: f64,
    pub features: FeatureConfig,
    pub forest: ForestParams,
    pub simulation: SimulationConfig,
    pub tail: TailParams,
    pub tie_policy: TiePolicy,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            split_ratio: 0.8,
            features: FeatureConfig::default(),
            forest: ForestParams::default(),
            simulation: SimulationConfig::default(),
            tail: TailParams::default(),
            tie_policy: TiePolicy::default(),
        }
    }
}

impl ExperimentConfig {
    /// Run-wide settings with the model's overrides applied.
    pub fn resolve(&self, model: &ModelConfig) -> Self {
        let mut cfg = *self;
        if let Some(ind) = model.indicator_config {
            cfg.features.indicators = ind;
        }
        if let Some(h) = model.horizon {
            cfg.features.horizon = h;
        }
        if let Some(f) = model.forest {
            cfg.forest = f;
        }
        if let Some(s) = model.simulation {
            cfg.simulation = s;
        }
        cfg
    }
}

/// Training rows: complete rows inside the train range whose target does
/// not reach into the test range.
pub fn train_rows(fm: &FeatureMatrix, split: &DatasetSplit) -> Vec<usize> {
    fm.complete_rows()
        .into_iter()
        .filter(|&t| t + fm.horizon < split.train.end)
        .collect()
}

/// Rows of the test range with every feature present, and their feature rows.
pub fn test_feature_rows(fm: &FeatureMatrix, split: &DatasetSplit) -> Vec<(usize, Vec<f64>)> {
    split
        .test
        .clone()
        .filter_map(|t| fm.feature_row(t).map(|r| (t, r)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelOutcome {
    pub config: ModelConfig,
    pub split: DatasetSplit,
    pub forest: ForestModel,
    pub thresholds: SignalThresholds,
    /// Prediction for each test bar (`None` where features are masked).
    pub test_predictions: Vec<Option<f64>>,
    /// One signal per test bar; masked bars hold.
    pub signals: Vec<Signal>,
    pub simulation: Simulation,
    pub train_metrics: PredictionMetrics,
    pub test_metrics: Option<PredictionMetrics>,
    pub oob: Option<OobScore>,
    pub risk: RiskReport,
    pub importance: ImportanceReport,
}

/// Runs one configuration with the serial forest trainer.
pub fn run_model(
    series: &BarSeries,
    curve: &RiskFreeCurve,
    model: &ModelConfig,
    cfg: &ExperimentConfig,
) -> Result<ModelOutcome> {
    run_model_with(series, curve, model, cfg, ForestModel::fit)
}

/// Runs one configuration, delegating forest training to `fit`.
pub fn run_model_with<F>(
    series: &BarSeries,
    curve: &RiskFreeCurve,
    model: &ModelConfig,
    cfg: &ExperimentConfig,
    fit: F,
) -> Result<ModelOutcome>
where
    F: Fn(&Matrix, &[f64], &ForestParams) -> Result<ForestModel>,
{
    let cfg = cfg.resolve(model);
    cfg.tail.validate()?;
    let split = chronological_split(series.len(), cfg.split_ratio)?;
    let fm = FeatureMatrix::build(series, &model.indicators, &cfg.features)?;

    let rows = train_rows(&fm, &split);
    if rows.is_empty() {
        return Err(Error::InsufficientData {
            needed: 1,
            got: 0,
        });
    }
    let (x, y) = fm.design(&rows)?;
    let forest = fit(&x, &y, &cfg.forest)?.with_feature_names(fm.feature_names())?;
    let oob = forest.oob_score(&x, &y).ok();
    let train_pred = forest.predict_matrix(&x)?;
    let train_metrics = PredictionMetrics::compute(&y, &train_pred)?;
    let thresholds = SignalThresholds::fit(&train_pred)?.with_tie_policy(cfg.tie_policy);

    let mut test_predictions = alloc::vec![None; split.test.len()];
    let mut actual = Vec::new();
    let mut predicted = Vec::new();
    for (t, row) in test_feature_rows(&fm, &split) {
        let p = forest.predict(&row)?;
        test_predictions[t - split.test.start] = Some(p);
        if let Some(target) = fm.target[t] {
            actual.push(target);
            predicted.push(p);
        }
    }
    let test_metrics = if actual.is_empty() {
        None
    } else {
        Some(PredictionMetrics::compute(&actual, &predicted)?)
    };
    let signals: Vec<Signal> = test_predictions
        .iter()
        .map(|p| p.map_or(Signal::Hold, |p| thresholds.classify(p)))
        .collect();

    let test_bars = &series.bars()[split.test.clone()];
    let simulation = simulate(test_bars, &signals, &cfg.simulation, curve)?;
    let risk = RiskReport::compute(&simulation.equity, &cfg.tail)?;
    let importance = forest.feature_importance();
    Ok(ModelOutcome {
        config: model.clone(),
        split,
        forest,
        thresholds,
        test_predictions,
        signals,
        simulation,
        train_metrics,
        test_metrics,
        oob,
        risk,
        importance,
    })
}

/// Buy-and-hold over the same test range as the models.
pub fn baseline(
    series: &BarSeries,
    curve: &RiskFreeCurve,
    cfg: &ExperimentConfig,
) -> Result<(EquityCurve, RiskReport)> {
    let split = chronological_split(series.len(), cfg.split_ratio)?;
    let equity = buy_and_hold_baseline(&series.bars()[split.test], &cfg.simulation, curve)?;
    let risk = RiskReport::compute(&equity, &cfg.tail)?;
    Ok((equity, risk))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{MinuteBar, Timestamp, YieldConvention};

    fn series(n: usize) -> BarSeries {
        let mut c = 100.0;
        let bars = (0..n)
            .map(|i| {
                c *= 1.0 + 0.001 * ((i as f64 * 1.3).sin() + 0.3 * (i as f64 * 0.17).cos());
                MinuteBar {
                    timestamp: Timestamp::new(i as i64 * 60, 0),
                    open: c,
                    high: c * 1.0005,
                    low: c * 0.9995,
                    close: c,
                    volume: 1000.0 + (i % 11) as f64 * 13.0,
                }
            })
            .collect();
        BarSeries::new("T", bars).unwrap()
    }

    fn quick() -> ExperimentConfig {
        ExperimentConfig {
            forest: ForestParams {
                n_estimators: 8,
                ..ForestParams::default()
            },
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn builtin_set() {
        let c = builtin_configs();
        assert_eq!(c.len(), 13);
        assert!(c[0].indicators.is_empty());
        assert_eq!(c[0].display_name(), "RFR (no indicators)");
        let mut names: Vec<&str> = c.iter().map(|m| m.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 13);
        assert!(!c.iter().any(|m| m.indicators.contains(&IndicatorFamily::Obv)));
        assert_eq!(
            c[12].indicators,
            [IndicatorFamily::Rsi, IndicatorFamily::Ema, IndicatorFamily::Bollinger]
        );
    }

    #[test]
    fn train_rows_stop_before_test_targets() {
        let s = series(400);
        let fm = FeatureMatrix::build(&s, &[], &FeatureConfig::default()).unwrap();
        let split = chronological_split(400, 0.8).unwrap();
        let rows = train_rows(&fm, &split);
        assert_eq!(*rows.last().unwrap(), split.train.end - 2);
    }

    #[test]
    fn base_model_runs() {
        let s = series(600);
        let curve = RiskFreeCurve::flat(0.0, YieldConvention::Annual252);
        let out = run_model(&s, &curve, &builtin_configs()[0], &quick()).unwrap();
        assert_eq!(out.signals.len(), out.split.test.len());
        assert_eq!(out.simulation.equity.values.len(), 120);
        let total: f64 = out.importance.importances.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(out.test_metrics.is_some());
    }

    #[test]
    fn overrides_apply() {
        let mut m = ModelConfig::new("x", Vec::new());
        m.horizon = Some(3);
        m.forest = Some(ForestParams {
            n_estimators: 2,
            ..ForestParams::default()
        });
        let cfg = ExperimentConfig::default().resolve(&m);
        assert_eq!(cfg.features.horizon, 3);
        assert_eq!(cfg.forest.n_estimators, 2);
    }

    #[test]
    fn test_rows_do_not_affect_training() {
        let s = series(600);
        let curve = RiskFreeCurve::flat(0.0, YieldConvention::Annual252);
        let a = run_model(&s, &curve, &builtin_configs()[3], &quick()).unwrap();
        let split = a.split.clone();
        let mut bars = s.bars().to_vec();
        for (i, b) in bars[split.test.clone()].iter_mut().enumerate() {
            let k = 1.0 + 0.01 * ((i * 7919) % 13) as f64;
            b.open *= k;
            b.high *= k;
            b.low *= k;
            b.close *= k;
            b.volume *= 2.0;
        }
        let b = run_model(&BarSeries::new("T", bars).unwrap(), &curve, &builtin_configs()[3], &quick()).unwrap();
        assert_eq!(a.forest, b.forest);
        assert_eq!(a.thresholds, b.thresholds);
        assert_eq!(a.train_metrics, b.train_metrics);
    }
}
