//! JSON run configuration. Every field has a default, so `{}` is a complete
//! config describing the standard setup.

use std::path::Path;

use barforest_core::experiment::{builtin_configs, ExperimentConfig, ModelConfig};
use barforest_core::{TradingSession, YieldConvention};
use chrono::NaiveTime;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::BarSchema;
use crate::synth::SynthConfig;

/// Inclusive session bounds as `HH:MM` Central time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    pub start: String,
    pub end: String,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            start: "10:00".into(),
            end: "15:30".into(),
        }
    }
}

pub(crate) fn minute_of(s: &str) -> Result<u32> {
    let t = NaiveTime::parse_from_str(s.trim(), "%H:%M")
        .map_err(|_| Error::Config(format!("`{s}` is not HH:MM")))?;
    Ok(chrono::Timelike::hour(&t) * 60 + chrono::Timelike::minute(&t))
}

impl SessionConfig {
    pub fn to_session(&self) -> Result<TradingSession> {
        let session = TradingSession {
            start_minute: minute_of(&self.start)?,
            end_minute: minute_of(&self.end)?,
        };
        if session.start_minute > session.end_minute {
            return Err(Error::Config("session start is after its end".into()));
        }
        Ok(session)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub symbol: String,
    pub schema: BarSchema,
    pub filter_hours: bool,
    pub session: SessionConfig,
    pub yield_convention: YieldConvention,
    #[serde(flatten)]
    pub experiment: ExperimentConfig,
    /// Model set; the thirteen built-in configurations when absent.
    pub models: Option<Vec<ModelConfig>>,
    pub synth: SynthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            symbol: "SPY".into(),
            schema: BarSchema::default(),
            filter_hours: true,
            session: SessionConfig::default(),
            yield_convention: YieldConvention::default(),
            experiment: ExperimentConfig::default(),
            models: None,
            synth: SynthConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Config at `path`, or the defaults.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    /// The configured models, optionally narrowed to `names` (in that order).
    pub fn select_models(&self, names: Option<&[String]>) -> Result<Vec<ModelConfig>> {
        let all = self.models.clone().unwrap_or_else(builtin_configs);
        let mut seen = std::collections::BTreeSet::new();
        for m in &all {
            if !seen.insert(m.name.clone()) {
                return Err(barforest_core::Error::DuplicateModel(m.name.clone()).into());
            }
        }
        let Some(names) = names else {
            return Ok(all);
        };
        names
            .iter()
            .map(|n| {
                all.iter()
                    .find(|m| &m.name == n)
                    .cloned()
                    .ok_or_else(|| Error::UnknownModel(n.clone()))
            })
            .collect()
    }
}
