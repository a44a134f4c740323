//! Curve readers and writers for CSV, JSON, and Standard MIDI Files.
//!
//! CSV comes in two layouts. A single column (optional header `value`) lists
//! one depth per frame. Two columns (`time,value`) list pedal events that are
//! held until the next event and sampled at the requested frame rate, from
//! `t = 0` through the last event time.
//!
//! JSON is `{"frame_rate_hz": 100, "values": [...], "source_id": "..."}`,
//! with `source_id` optional.

use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::curve::{check_rate, frames_covering, sample_and_hold, PedalCurve};
use crate::error::{PedalError, Result};
use crate::smf;

fn parse_value(field: &str, line: u64, what: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| PedalError::Parse {
        line,
        message: format!("invalid {what} `{}`", field.trim()),
    })
}

fn check_depth(v: f64, line: u64) -> Result<f64> {
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(PedalError::Range {
            location: format!("line {line}"),
            value: v,
        })
    }
}

/// Reads a depth curve from CSV text.
pub fn load_csv(bytes: &[u8], frame_rate_hz: f64) -> Result<PedalCurve> {
    check_rate(frame_rate_hz)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);

    let mut rows: Vec<(u64, csv::StringRecord)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| PedalError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push((line, record));
    }
    let Some((_, first)) = rows.first() else {
        return Err(PedalError::EmptyInput("CSV has no rows".into()));
    };

    let has_header = first[0].parse::<f64>().is_err();
    let columns = first.len();
    if columns > 2 {
        return Err(PedalError::Parse {
            line: rows[0].0,
            message: format!("expected 1 or 2 columns, found {columns}"),
        });
    }
    let data = if has_header { &rows[1..] } else { &rows[..] };
    if data.is_empty() {
        return Err(PedalError::EmptyInput(
            "CSV has a header but no data".into(),
        ));
    }

    if columns == 1 {
        let values = data
            .iter()
            .map(|(line, rec)| {
                if rec.len() != 1 {
                    return Err(PedalError::Parse {
                        line: *line,
                        message: format!("expected 1 column, found {}", rec.len()),
                    });
                }
                check_depth(parse_value(&rec[0], *line, "value")?, *line)
            })
            .collect::<Result<Vec<_>>>()?;
        return PedalCurve::new(frame_rate_hz, values, "");
    }

    let mut events = Vec::with_capacity(data.len());
    for (line, rec) in data {
        if rec.len() != 2 {
            return Err(PedalError::Parse {
                line: *line,
                message: format!("expected 2 columns, found {}", rec.len()),
            });
        }
        let t = parse_value(&rec[0], *line, "time")?;
        if !t.is_finite() || t < 0.0 {
            return Err(PedalError::Parse {
                line: *line,
                message: format!("time must be a non-negative number, got {t}"),
            });
        }
        let v = check_depth(parse_value(&rec[1], *line, "value")?, *line)?;
        events.push((t, v));
    }
    // Stable: equal timestamps keep file order, so the last one wins.
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let end = events.last().map_or(0.0, |e| e.0);
    let n = frames_covering(end, frame_rate_hz);
    PedalCurve::new(
        frame_rate_hz,
        sample_and_hold(&events, n, frame_rate_hz),
        "",
    )
}

/// Reads a depth curve from its JSON representation.
pub fn load_json(bytes: &[u8]) -> Result<PedalCurve> {
    let doc: Value = serde_json::from_slice(bytes)
        .map_err(|e| PedalError::Schema(format!("invalid JSON: {e}")))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| PedalError::Schema("top level must be an object".into()))?;

    let rate = obj
        .get("frame_rate_hz")
        .ok_or_else(|| PedalError::Schema("frame_rate_hz missing".into()))?
        .as_f64()
        .ok_or_else(|| PedalError::Schema("frame_rate_hz: expected a number".into()))?;
    if !(rate.is_finite() && rate > 0.0) {
        return Err(PedalError::Schema(format!(
            "frame_rate_hz: must be positive, got {rate}"
        )));
    }

    let raw = obj
        .get("values")
        .ok_or_else(|| PedalError::Schema("values missing".into()))?
        .as_array()
        .ok_or_else(|| PedalError::Schema("values: expected an array".into()))?;
    if raw.is_empty() {
        return Err(PedalError::EmptyInput("values is empty".into()));
    }
    let values = raw
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let x = v
                .as_f64()
                .ok_or_else(|| PedalError::Schema(format!("values[{i}]: expected a number")))?;
            if (0.0..=1.0).contains(&x) {
                Ok(x)
            } else {
                Err(PedalError::Range {
                    location: format!("values[{i}]"),
                    value: x,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let source_id = match obj.get("source_id") {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(PedalError::Schema("source_id: expected a string".into())),
    };
    PedalCurve::new(rate, values, source_id)
}

/// Serializes a curve in the format accepted by [`load_json`].
pub fn to_json(curve: &PedalCurve) -> String {
    serde_json::to_string(curve).expect("curve serialization cannot fail")
}

/// Writes a single-column CSV with a `value` header.
pub fn to_csv(curve: &PedalCurve) -> String {
    let mut out = String::with_capacity(curve.len() * 8 + 6);
    out.push_str("value\n");
    for v in curve.values() {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

/// Input formats recognised by file extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveFormat {
    Csv,
    Json,
    Midi,
}

impl CurveFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        match ext.as_str() {
            "csv" | "txt" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "mid" | "midi" | "smf" => Ok(Self::Midi),
            _ => Err(PedalError::Unsupported(format!(
                "cannot infer curve format from `{}` (use .csv, .json, or .mid)",
                path.display()
            ))),
        }
    }
}

/// Loads a curve file, dispatching on its extension.
///
/// CSV and MIDI inputs are sampled at `frame_rate_hz`; JSON carries its own
/// rate. The returned curve's `source_id` is the path unless the JSON sets one.
pub fn load_curve_file(path: &Path, frame_rate_hz: f64) -> Result<PedalCurve> {
    let format = CurveFormat::from_path(path).map_err(|e| e.in_file(path))?;
    let bytes = fs::read(path).map_err(|source| PedalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_curve_bytes(&bytes, format, frame_rate_hz)
        .map(|c| {
            if c.source_id().is_empty() {
                c.with_source_id(path.display().to_string())
            } else {
                c
            }
        })
        .map_err(|e| e.in_file(path))
}

pub fn load_curve_bytes(
    bytes: &[u8],
    format: CurveFormat,
    frame_rate_hz: f64,
) -> Result<PedalCurve> {
    match format {
        CurveFormat::Csv => load_csv(bytes, frame_rate_hz),
        CurveFormat::Json => load_json(bytes),
        CurveFormat::Midi => smf::extract_cc64(bytes, frame_rate_hz),
    }
}
