//! Cross-model tables built from a finished run directory.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use barforest_core::metrics::RiskReport;

use crate::error::{Error, Result};
use crate::io;
use crate::runner::{model_dir, BaselineMetrics, ModelMetrics, RunManifest};

/// One row of the trading comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub model: String,
    pub label: String,
    pub risk: RiskReport,
    /// Final value relative to buy-and-hold, in percent.
    pub return_vs_baseline_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Sorted by final value, best first; includes the baseline.
    pub comparison: Vec<ComparisonRow>,
    pub models: Vec<ModelMetrics>,
    pub baseline: BaselineMetrics,
}

fn require(path: &Path, run: &Path, missing: String) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::IncompleteRun {
            path: run.to_path_buf(),
            missing,
        })
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Reads the run at `out` and writes `out/report/{comparison,prediction,
/// importance,equity}.csv`.
pub fn build(out: &Path) -> Result<Report> {
    let manifest_path = out.join("manifest.json");
    require(&manifest_path, out, "manifest.json".into())?;
    let manifest: RunManifest = io::read_json(&manifest_path)?;

    let mut models = Vec::new();
    for m in &manifest.models {
        let p = model_dir(out, &m.name).join("metrics.json");
        require(&p, out, format!("models/{}/metrics.json", m.name))?;
        models.push(io::read_json::<ModelMetrics>(&p)?);
    }
    let base_path = out.join("baseline").join("metrics.json");
    require(&base_path, out, "baseline/metrics.json".into())?;
    let baseline: BaselineMetrics = io::read_json(&base_path)?;

    let base_value = baseline.risk.final_value;
    let mut comparison: Vec<ComparisonRow> = models
        .iter()
        .map(|m| (m.model.clone(), m.label.clone(), m.risk))
        .chain(std::iter::once((
            baseline.model.clone(),
            baseline.label.clone(),
            baseline.risk,
        )))
        .map(|(model, label, risk)| ComparisonRow {
            return_vs_baseline_pct: (risk.final_value / base_value - 1.0) * 100.0,
            model,
            label,
            risk,
        })
        .collect();
    comparison.sort_by(|a, b| {
        b.risk
            .final_value
            .total_cmp(&a.risk.final_value)
            .then_with(|| a.model.cmp(&b.model))
    });

    let dir = out.join("report");
    fs::create_dir_all(&dir).map_err(Error::io(&dir))?;

    let mut w = csv::Writer::from_path(dir.join("comparison.csv"))?;
    w.write_record([
        "Model",
        "Final Value",
        "Return %",
        "Total Return %",
        "Sharpe",
        "Sortino",
        "Max Drawdown",
        "Rachev",
        "Modified Rachev",
        "Distortion RRR",
        "Gain-Loss",
        "STAR",
        "MiniMax",
        "Gini",
    ])?;
    for r in &comparison {
        let k = &r.risk;
        w.write_record([
            r.label.clone(),
            k.final_value.to_string(),
            r.return_vs_baseline_pct.to_string(),
            (k.total_return * 100.0).to_string(),
            cell(k.sharpe),
            cell(k.sortino),
            k.max_drawdown.to_string(),
            cell(k.rachev),
            cell(k.modified_rachev),
            cell(k.distortion_rrr),
            cell(k.gain_loss),
            cell(k.star),
            cell(k.minimax),
            cell(k.gini),
        ])?;
    }
    w.flush().map_err(Error::io(&dir))?;

    let mut w = csv::Writer::from_path(dir.join("prediction.csv"))?;
    w.write_record([
        "Model",
        "Train RMSE",
        "Train MAE",
        "Train R2",
        "Train Trend Accuracy",
        "Test RMSE",
        "Test MAE",
        "Test R2",
        "Test Trend Accuracy",
        "OOB R2",
    ])?;
    for m in &models {
        let t = m.test;
        w.write_record([
            m.label.clone(),
            m.train.rmse.to_string(),
            m.train.mae.to_string(),
            cell(m.train.r2),
            m.train.trend_accuracy.to_string(),
            cell(t.map(|t| t.rmse)),
            cell(t.map(|t| t.mae)),
            cell(t.and_then(|t| t.r2)),
            cell(t.map(|t| t.trend_accuracy)),
            cell(m.oob.as_ref().and_then(|o| o.r2)),
        ])?;
    }
    w.flush().map_err(Error::io(&dir))?;

    let mut w = csv::Writer::from_path(dir.join("importance.csv"))?;
    w.write_record(["model", "feature", "importance", "rank"])?;
    for m in &models {
        let mut ranked: Vec<_> = m.importance.iter().collect();
        ranked.sort_by(|a, b| b.importance.total_cmp(&a.importance));
        for (i, e) in ranked.into_iter().enumerate() {
            w.write_record([
                m.model.clone(),
                e.feature.clone(),
                e.importance.to_string(),
                (i + 1).to_string(),
            ])?;
        }
    }
    w.flush().map_err(Error::io(&dir))?;

    let mut w = csv::Writer::from_path(dir.join("equity.csv"))?;
    w.write_record(["model", "timestamp", "value"])?;
    let sources = models
        .iter()
        .map(|m| (m.model.clone(), model_dir(out, &m.model).join("equity.csv")))
        .chain(std::iter::once((
            baseline.model.clone(),
            out.join("baseline").join("equity.csv"),
        )));
    for (name, path) in sources {
        require(&path, out, path.display().to_string())?;
        let mut rdr = csv::Reader::from_path(&path)?;
        for rec in rdr.records() {
            let rec = rec?;
            w.write_record([name.as_str(), &rec[0], &rec[1]])?;
        }
    }
    w.flush().map_err(Error::io(&dir))?;

    Ok(Report {
        comparison,
        models,
        baseline,
    })
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.prec$}"))
}

impl Report {
    /// Plain-text comparison table.
    pub fn render(&self) -> String {
        let width = self
            .comparison
            .iter()
            .map(|r| r.label.len())
            .max()
            .unwrap_or(5)
            .max(5);
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<width$}  {:>11}  {:>9}  {:>9}  {:>9}  {:>7}  {:>8}",
            "Model", "Final Value", "Return %", "Sharpe", "Sortino", "Rachev", "Test R2"
        );
        for r in &self.comparison {
            let test_r2 = self
                .models
                .iter()
                .find(|m| m.model == r.model)
                .and_then(|m| m.test.and_then(|t| t.r2));
            let _ = writeln!(
                s,
                "{:<width$}  {:>11.2}  {:>9.2}  {:>9}  {:>9}  {:>7}  {:>8}",
                r.label,
                r.risk.final_value,
                r.return_vs_baseline_pct,
                fmt_opt(r.risk.sharpe, 5),
                fmt_opt(r.risk.sortino, 5),
                fmt_opt(r.risk.rachev, 3),
                fmt_opt(test_r2, 4),
            );
        }
        s
    }
}
