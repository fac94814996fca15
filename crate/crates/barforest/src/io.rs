//! CSV and JSON formats: bar and yield inputs, and the per-model exports.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use barforest_core::{
    BarSeries, Day, EquityCurve, FeatureMatrix, MinuteBar, RiskFreeCurve, Signal, Timestamp,
    TradeRecord, TradeSide, YieldConvention,
};
use chrono::{DateTime, FixedOffset, NaiveDate, NaiveDateTime, Offset, TimeZone, Utc};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Zone assumed for timestamps that carry no UTC offset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NaiveZone {
    #[default]
    Ct,
    Et,
}

impl NaiveZone {
    fn tz(self) -> Tz {
        match self {
            NaiveZone::Ct => chrono_tz::America::Chicago,
            NaiveZone::Et => chrono_tz::America::New_York,
        }
    }
}

/// Column names of the bars CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BarSchema {
    pub timestamp: String,
    pub open: String,
    pub high: String,
    pub low: String,
    pub close: String,
    pub volume: String,
    pub naive_zone: NaiveZone,
}

impl Default for BarSchema {
    fn default() -> Self {
        Self {
            timestamp: "timestamp".into(),
            open: "open".into(),
            high: "high".into(),
            low: "low".into(),
            close: "close".into(),
            volume: "volume".into(),
            naive_zone: NaiveZone::Ct,
        }
    }
}

/// Converts an instant to a core timestamp carrying the Central offset.
pub fn to_central(utc: DateTime<Utc>) -> Timestamp {
    let offset = utc
        .with_timezone(&chrono_tz::America::Chicago)
        .offset()
        .fix()
        .local_minus_utc();
    Timestamp::new(utc.timestamp(), offset)
}

/// ISO-8601 with offset, or a naive date-time read in `naive` local time.
pub fn parse_timestamp(s: &str, naive: NaiveZone) -> Option<Timestamp> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(to_central(dt.with_timezone(&Utc)));
    }
    let local = ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())?;
    let dt = naive.tz().from_local_datetime(&local).earliest()?;
    Some(to_central(dt.with_timezone(&Utc)))
}

pub fn format_timestamp(t: Timestamp) -> String {
    let offset = FixedOffset::east_opt(t.offset_secs).expect("offset within a day");
    match offset.timestamp_opt(t.epoch_secs, 0).single() {
        Some(dt) => dt.format("%Y-%m-%dT%H:%M:%S%:z").to_string(),
        None => t.epoch_secs.to_string(),
    }
}

pub fn day_of(date: NaiveDate) -> Day {
    let epoch = NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid date");
    Day((date - epoch).num_days() as i32)
}

pub fn date_of(day: Day) -> NaiveDate {
    let epoch = NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid date");
    epoch + chrono::Duration::days(i64::from(day.0))
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::MissingColumn(name.to_string()))
}

fn field(rec: &csv::StringRecord, idx: usize, line: usize) -> Result<&str> {
    rec.get(idx).ok_or_else(|| Error::UnparseableRow {
        line,
        reason: "too few fields".into(),
    })
}

fn number(rec: &csv::StringRecord, idx: usize, line: usize, name: &str) -> Result<f64> {
    let raw = field(rec, idx, line)?;
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::UnparseableRow {
            line,
            reason: format!("{name} `{raw}` is not a finite number"),
        }),
    }
}

/// Reads and validates minute bars. Diagnostics carry 1-based file line
/// numbers (the header is line 1).
pub fn load_bars(reader: impl Read, schema: &BarSchema, symbol: &str) -> Result<BarSeries> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let cols = [
        column(&headers, &schema.timestamp)?,
        column(&headers, &schema.open)?,
        column(&headers, &schema.high)?,
        column(&headers, &schema.low)?,
        column(&headers, &schema.close)?,
        column(&headers, &schema.volume)?,
    ];
    let mut bars: Vec<MinuteBar> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(bars.len() + 2, |p| p.line() as usize);
        let raw_ts = field(&rec, cols[0], line)?;
        let timestamp =
            parse_timestamp(raw_ts, schema.naive_zone).ok_or_else(|| Error::UnparseableRow {
                line,
                reason: format!("timestamp `{raw_ts}` is not ISO-8601"),
            })?;
        let bar = MinuteBar {
            timestamp,
            open: number(&rec, cols[1], line, "open")?,
            high: number(&rec, cols[2], line, "high")?,
            low: number(&rec, cols[3], line, "low")?,
            close: number(&rec, cols[4], line, "close")?,
            volume: number(&rec, cols[5], line, "volume")?,
        };
        match bar.check(bars.len()) {
            Ok(()) => {}
            Err(barforest_core::Error::NonPositivePrice { .. }) => {
                return Err(Error::NonPositivePrice { line })
            }
            Err(barforest_core::Error::OhlcInvariantViolation { .. }) => {
                return Err(Error::OhlcInvariantViolation { line })
            }
            Err(e) => {
                return Err(Error::UnparseableRow {
                    line,
                    reason: e.to_string(),
                })
            }
        }
        if bars
            .last()
            .is_some_and(|prev| prev.timestamp.epoch_secs >= timestamp.epoch_secs)
        {
            return Err(Error::NonMonotonicTimestamp { line });
        }
        bars.push(bar);
    }
    if bars.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(BarSeries::new(symbol, bars)?)
}

pub fn load_bars_path(path: &Path, schema: &BarSchema, symbol: &str) -> Result<BarSeries> {
    let file = File::open(path).map_err(Error::io(path))?;
    load_bars(file, schema, symbol)
}

/// Reads `date,yield` rows, yields in percent.
pub fn load_rates(reader: impl Read, convention: YieldConvention) -> Result<RiskFreeCurve> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let date_col = column(&headers, "date")?;
    let yield_col = column(&headers, "yield")?;
    let mut entries = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(entries.len() + 2, |p| p.line() as usize);
        let raw = field(&rec, date_col, line)?;
        let date = NaiveDate::parse_from_str(raw, "%Y-%m-%d").map_err(|_| Error::UnparseableRow {
            line,
            reason: format!("date `{raw}` is not YYYY-MM-DD"),
        })?;
        let pct = number(&rec, yield_col, line, "yield")?;
        entries.push((day_of(date), pct / 100.0));
    }
    if entries.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(RiskFreeCurve::new(entries, convention)?)
}

pub fn load_rates_path(path: &Path, convention: YieldConvention) -> Result<RiskFreeCurve> {
    let file = File::open(path).map_err(Error::io(path))?;
    load_rates(file, convention)
}

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(Error::io(path))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_bars(path: &Path, series: &BarSeries) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["timestamp", "open", "high", "low", "close", "volume"])?;
    for b in series.bars() {
        w.write_record([
            format_timestamp(b.timestamp),
            b.open.to_string(),
            b.high.to_string(),
            b.low.to_string(),
            b.close.to_string(),
            b.volume.to_string(),
        ])?;
    }
    w.flush().map_err(Error::io(path))?;
    Ok(())
}

/// `yields` are in percent, as in the input format.
pub fn write_rates(path: &Path, yields: &[(NaiveDate, f64)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["date", "yield"])?;
    for (d, y) in yields {
        w.write_record([d.format("%Y-%m-%d").to_string(), y.to_string()])?;
    }
    w.flush().map_err(Error::io(path))?;
    Ok(())
}

/// Timestamp, every feature column and the target; masked cells are empty.
pub fn write_features(path: &Path, series: &BarSeries, fm: &FeatureMatrix) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["timestamp".to_string()];
    header.extend(fm.feature_names());
    header.push("target".into());
    w.write_record(&header)?;
    for (t, bar) in series.bars().iter().enumerate() {
        let mut rec = vec![format_timestamp(bar.timestamp)];
        rec.extend(fm.columns.iter().map(|c| opt(c.values[t])));
        rec.push(opt(fm.target[t]));
        w.write_record(&rec)?;
    }
    w.flush().map_err(Error::io(path))?;
    Ok(())
}

pub fn write_signals(
    path: &Path,
    bars: &[MinuteBar],
    predictions: &[Option<f64>],
    signals: &[Signal],
) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["timestamp", "prediction", "signal"])?;
    for ((b, p), s) in bars.iter().zip(predictions).zip(signals) {
        w.write_record([format_timestamp(b.timestamp), opt(*p), s.as_str().to_string()])?;
    }
    w.flush().map_err(Error::io(path))?;
    Ok(())
}

fn side_label(t: &TradeRecord) -> &'static str {
    match (t.side, t.skipped) {
        (TradeSide::Buy, false) => "buy",
        (TradeSide::Sell, false) => "sell",
        (TradeSide::Buy, true) => "buy_skipped",
        (TradeSide::Sell, true) => "sell_skipped",
    }
}

/// `portfolio_value` is the value before the trade, the cap's reference.
pub fn write_trades(path: &Path, trades: &[TradeRecord]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["timestamp", "side", "shares", "price", "value_traded", "portfolio_value"])?;
    for t in trades {
        w.write_record([
            format_timestamp(t.timestamp),
            side_label(t).to_string(),
            t.shares.to_string(),
            t.price.to_string(),
            t.value_traded.to_string(),
            t.portfolio_value_before.to_string(),
        ])?;
    }
    w.flush().map_err(Error::io(path))?;
    Ok(())
}

pub fn write_equity(path: &Path, curve: &EquityCurve) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["timestamp", "value", "return", "risk_free"])?;
    for i in 0..curve.values.len() {
        w.write_record([
            format_timestamp(curve.timestamps[i]),
            curve.values[i].to_string(),
            curve.returns[i].to_string(),
            curve.risk_free[i].to_string(),
        ])?;
    }
    w.flush().map_err(Error::io(path))?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(Error::io(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(Error::io(path))?;
    w.flush().map_err(Error::io(path))?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(Error::io(path))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestamps_normalise_to_central() {
        let t = parse_timestamp("2024-03-04T11:00:00-05:00", NaiveZone::Ct).unwrap();
        assert_eq!(t.offset_secs, -6 * 3600);
        assert_eq!(t.minute_of_day(), 10 * 60);
        assert_eq!(format_timestamp(t), "2024-03-04T10:00:00-06:00");
        let et = parse_timestamp("2024-03-04 11:00:00", NaiveZone::Et).unwrap();
        assert_eq!(et, t);
        let ct = parse_timestamp("2024-03-04 10:00", NaiveZone::Ct).unwrap();
        assert_eq!(ct, t);
        // daylight saving time
        let summer = parse_timestamp("2024-07-01T10:00:00-05:00", NaiveZone::Ct).unwrap();
        assert_eq!(summer.offset_secs, -5 * 3600);
        assert_eq!(summer.minute_of_day(), 10 * 60);
        assert!(parse_timestamp("yesterday", NaiveZone::Ct).is_none());
    }

    #[test]
    fn day_round_trip() {
        let d = NaiveDate::from_ymd_opt(2024, 1, 2).unwrap();
        assert_eq!(date_of(day_of(d)), d);
        let t = parse_timestamp("2024-01-02T23:30:00-06:00", NaiveZone::Ct).unwrap();
        assert_eq!(t.day(), day_of(d));
    }
}
