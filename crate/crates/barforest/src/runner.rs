//! Pipeline stages over files: feature export, training, simulation and the
//! all-models run with its summary table.

use std::fs;
use std::path::{Path, PathBuf};

use barforest_core::experiment::{
    baseline, run_model_with, ExperimentConfig, ModelConfig, ModelOutcome,
};
use barforest_core::forest::{fit_tree, Matrix};
use barforest_core::metrics::{PredictionMetrics, RiskReport};
use barforest_core::{
    filter_trading_hours, BarSeries, FeatureMatrix, ForestModel, ForestParams, IndicatorFamily,
    OobScore, RiskFreeCurve, Signal, SignalThresholds, YieldConvention,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::io;

pub const BASELINE_NAME: &str = "buy_and_hold";
pub const BASELINE_LABEL: &str = "Buy and hold";

/// Validated, session-filtered bars and the risk-free curve.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub series: BarSeries,
    pub curve: RiskFreeCurve,
}

/// Loads bars (filtered to the configured session) and yields. Without a
/// rates file the risk-free rate is zero.
pub fn load_inputs(bars: &Path, rates: Option<&Path>, cfg: &RunConfig) -> Result<Inputs> {
    let raw = io::load_bars_path(bars, &cfg.schema, &cfg.symbol)?;
    let series = if cfg.filter_hours {
        filter_trading_hours(&raw, cfg.session.to_session()?)
    } else {
        raw
    };
    if series.is_empty() {
        return Err(Error::EmptyInput);
    }
    let curve = match rates {
        Some(p) => io::load_rates_path(p, cfg.yield_convention)?,
        None => RiskFreeCurve::flat(0.0, YieldConvention::AsGiven),
    };
    Ok(Inputs { series, curve })
}

/// Grows the trees on the rayon pool; the result equals [`ForestModel::fit`].
pub fn fit_parallel(
    x: &Matrix,
    y: &[f64],
    params: &ForestParams,
) -> barforest_core::Result<ForestModel> {
    let fitted = (0..params.n_estimators)
        .into_par_iter()
        .map(|b| fit_tree(x, y, params, b))
        .collect::<barforest_core::Result<Vec<_>>>()?;
    ForestModel::from_trees(x.cols(), params, fitted)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceEntry {
    pub feature: String,
    pub importance: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub buy: usize,
    pub hold: usize,
    pub sell: usize,
    pub skipped: usize,
}

/// Contents of a model's `metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetrics {
    pub model: String,
    pub label: String,
    pub indicators: Vec<IndicatorFamily>,
    pub features: Vec<String>,
    pub seed: u64,
    pub train_rows: usize,
    pub test_bars: usize,
    pub thresholds: SignalThresholds,
    pub train: PredictionMetrics,
    pub test: Option<PredictionMetrics>,
    pub oob: Option<OobScore>,
    pub risk: RiskReport,
    pub signals: Counts,
    pub trades: Counts,
    pub importance: Vec<ImportanceEntry>,
}

/// Contents of `baseline/metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineMetrics {
    pub model: String,
    pub label: String,
    pub test_bars: usize,
    pub risk: RiskReport,
}

impl ModelMetrics {
    pub fn from_outcome(o: &ModelOutcome) -> Self {
        let mut signals = Counts::default();
        for s in &o.signals {
            match s {
                Signal::Buy => signals.buy += 1,
                Signal::Hold => signals.hold += 1,
                Signal::Sell => signals.sell += 1,
            }
        }
        let mut trades = Counts::default();
        for t in &o.simulation.trades {
            if t.skipped {
                trades.skipped += 1;
            } else if t.side == barforest_core::TradeSide::Buy {
                trades.buy += 1;
            } else {
                trades.sell += 1;
            }
        }
        Self {
            model: o.config.name.clone(),
            label: o.config.display_name().to_string(),
            indicators: o.config.indicators.clone(),
            features: o.forest.feature_names.clone(),
            seed: o.forest.params.random_seed,
            train_rows: o.train_metrics.n,
            test_bars: o.signals.len(),
            thresholds: o.thresholds,
            train: o.train_metrics,
            test: o.test_metrics,
            oob: o.oob.clone(),
            risk: o.risk,
            signals,
            trades,
            importance: o
                .importance
                .names
                .iter()
                .zip(&o.importance.importances)
                .map(|(f, i)| ImportanceEntry {
                    feature: f.clone(),
                    importance: *i,
                })
                .collect(),
        }
    }
}

pub fn model_dir(out: &Path, name: &str) -> PathBuf {
    out.join("models").join(name)
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(Error::io(path))
}

fn with_model<T>(name: &str, r: barforest_core::Result<T>) -> Result<T> {
    r.map_err(|source| Error::Model {
        model: name.to_string(),
        source,
    })
}

pub fn write_importance(path: &Path, forest: &ForestModel) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["feature", "importance", "rank"])?;
    for (rank, (name, imp)) in forest.feature_importance().ranked().into_iter().enumerate() {
        w.write_record([name.to_string(), imp.to_string(), (rank + 1).to_string()])?;
    }
    w.flush().map_err(Error::io(path))?;
    Ok(())
}

/// Writes every artifact of one finished model into `dir`.
pub fn write_outcome(dir: &Path, inputs: &Inputs, o: &ModelOutcome) -> Result<ModelMetrics> {
    create_dir(dir)?;
    let test_bars = &inputs.series.bars()[o.split.test.clone()];
    io::write_json(&dir.join("model.json"), &o.forest)?;
    write_importance(&dir.join("importance.csv"), &o.forest)?;
    io::write_signals(&dir.join("signals.csv"), test_bars, &o.test_predictions, &o.signals)?;
    io::write_trades(&dir.join("trades.csv"), &o.simulation.trades)?;
    io::write_equity(&dir.join("equity.csv"), &o.simulation.equity)?;
    let metrics = ModelMetrics::from_outcome(o);
    io::write_json(&dir.join("metrics.json"), &metrics)?;
    Ok(metrics)
}

/// Exports the feature matrix of each model to `out/features/<name>.csv`.
pub fn export_features(inputs: &Inputs, models: &[ModelConfig], cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let dir = out.join("features");
    create_dir(&dir)?;
    models
        .iter()
        .map(|m| {
            let resolved = cfg.resolve(m);
            let fm = with_model(
                &m.name,
                FeatureMatrix::build(&inputs.series, &m.indicators, &resolved.features),
            )?;
            let path = dir.join(format!("{}.csv", m.name));
            io::write_features(&path, &inputs.series, &fm)?;
            Ok(path)
        })
        .collect()
}

/// Training report written next to `model.json` by the `train` stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainMetrics {
    pub model: String,
    pub train: PredictionMetrics,
    pub oob: Option<OobScore>,
    pub thresholds: SignalThresholds,
}

/// Fits each model and writes `model.json`, `importance.csv` and `train.json`.
pub fn train(inputs: &Inputs, models: &[ModelConfig], cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    models.par_iter().try_for_each(|m| {
        let o = with_model(
            &m.name,
            run_model_with(&inputs.series, &inputs.curve, m, cfg, fit_parallel),
        )?;
        let dir = model_dir(out, &m.name);
        create_dir(&dir)?;
        io::write_json(&dir.join("model.json"), &o.forest)?;
        write_importance(&dir.join("importance.csv"), &o.forest)?;
        io::write_json(
            &dir.join("train.json"),
            &TrainMetrics {
                model: m.name.clone(),
                train: o.train_metrics,
                oob: o.oob,
                thresholds: o.thresholds,
            },
        )
    })
}

/// Reuses each trained `model.json` to produce signals, trades, the equity
/// curve and metrics.
pub fn simulate(inputs: &Inputs, models: &[ModelConfig], cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    models.par_iter().try_for_each(|m| {
        let dir = model_dir(out, &m.name);
        let model_path = dir.join("model.json");
        if !model_path.exists() {
            return Err(Error::IncompleteRun {
                path: dir.clone(),
                missing: "model.json".into(),
            });
        }
        let forest: ForestModel = io::read_json(&model_path)?;
        let train_json = dir.join("train.json");
        let oob = if train_json.exists() {
            io::read_json::<TrainMetrics>(&train_json)?.oob
        } else {
            None
        };
        let mut o = with_model(
            &m.name,
            run_model_with(&inputs.series, &inputs.curve, m, cfg, |x, _, _| {
                if x.cols() != forest.n_features {
                    return Err(barforest_core::Error::DimensionMismatch {
                        expected: forest.n_features,
                        got: x.cols(),
                    });
                }
                Ok(forest.clone())
            }),
        )?;
        o.oob = oob;
        write_outcome(&dir, inputs, &o).map(|_| ())
    })?;
    write_baseline(inputs, cfg, out)?;
    Ok(())
}

pub fn write_baseline(inputs: &Inputs, cfg: &ExperimentConfig, out: &Path) -> Result<BaselineMetrics> {
    let dir = out.join("baseline");
    create_dir(&dir)?;
    let (equity, risk) = baseline(&inputs.series, &inputs.curve, cfg)?;
    io::write_equity(&dir.join("equity.csv"), &equity)?;
    let metrics = BaselineMetrics {
        model: BASELINE_NAME.into(),
        label: BASELINE_LABEL.into(),
        test_bars: equity.values.len(),
        risk,
    };
    io::write_json(&dir.join("metrics.json"), &metrics)?;
    Ok(metrics)
}

/// What a run was asked to do; written as `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub bars: PathBuf,
    pub rates: Option<PathBuf>,
    pub out: PathBuf,
    pub split_ratio: f64,
    pub seed: u64,
    pub models: Vec<ModelConfig>,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub model: String,
    pub label: String,
    pub status: String,
    pub final_value: Option<f64>,
    pub total_return: Option<f64>,
    pub sharpe: Option<f64>,
    pub sortino: Option<f64>,
    pub max_drawdown: Option<f64>,
    pub rachev: Option<f64>,
    pub train_r2: Option<f64>,
    pub test_r2: Option<f64>,
    pub oob_r2: Option<f64>,
}

impl SummaryRow {
    fn from_risk(model: &str, label: &str, risk: &RiskReport) -> Self {
        Self {
            model: model.into(),
            label: label.into(),
            status: "ok".into(),
            final_value: Some(risk.final_value),
            total_return: Some(risk.total_return),
            sharpe: risk.sharpe,
            sortino: risk.sortino,
            max_drawdown: Some(risk.max_drawdown),
            rachev: risk.rachev,
            train_r2: None,
            test_r2: None,
            oob_r2: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    /// Sorted by final value, best first; failed models last.
    pub rows: Vec<SummaryRow>,
    pub failures: Vec<(String, String)>,
}

/// Runs every model (in parallel), the buy-and-hold baseline, and writes
/// `summary.csv` and `manifest.json`. A failing model is reported in the
/// summary without stopping the others.
pub fn run_all(inputs: &Inputs, manifest: &RunManifest) -> Result<RunSummary> {
    let out = &manifest.out;
    create_dir(out)?;
    io::write_json(&out.join("manifest.json"), manifest)?;
    let cfg = &manifest.config.experiment;

    let results: Vec<(ModelConfig, Result<ModelMetrics>)> = manifest
        .models
        .par_iter()
        .map(|m| {
            let r = with_model(
                &m.name,
                run_model_with(&inputs.series, &inputs.curve, m, cfg, fit_parallel),
            )
            .and_then(|o| write_outcome(&model_dir(out, &m.name), inputs, &o));
            (m.clone(), r)
        })
        .collect();

    let base = write_baseline(inputs, cfg, out)?;
    let mut rows = vec![SummaryRow::from_risk(BASELINE_NAME, BASELINE_LABEL, &base.risk)];
    let mut failures = Vec::new();
    for (m, r) in results {
        match r {
            Ok(metrics) => {
                let mut row = SummaryRow::from_risk(&metrics.model, &metrics.label, &metrics.risk);
                row.train_r2 = metrics.train.r2;
                row.test_r2 = metrics.test.and_then(|t| t.r2);
                row.oob_r2 = metrics.oob.as_ref().and_then(|o| o.r2);
                rows.push(row);
            }
            Err(e) => {
                let dir = model_dir(out, &m.name);
                create_dir(&dir)?;
                io::write_json(
                    &dir.join("error.json"),
                    &serde_json::json!({ "kind": e.kind(), "message": e.to_string() }),
                )?;
                rows.push(SummaryRow {
                    model: m.name.clone(),
                    label: m.display_name().to_string(),
                    status: format!("error: {e}"),
                    final_value: None,
                    total_return: None,
                    sharpe: None,
                    sortino: None,
                    max_drawdown: None,
                    rachev: None,
                    train_r2: None,
                    test_r2: None,
                    oob_r2: None,
                });
                failures.push((m.name.clone(), e.to_string()));
            }
        }
    }
    rows.sort_by(|a, b| {
        let key = |r: &SummaryRow| r.final_value.unwrap_or(f64::NEG_INFINITY);
        key(b).total_cmp(&key(a)).then_with(|| a.model.cmp(&b.model))
    });
    let mut w = csv::Writer::from_path(out.join("summary.csv"))?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush().map_err(Error::io(out.join("summary.csv")))?;
    Ok(RunSummary { rows, failures })
}
