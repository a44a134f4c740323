//! Pair and corpus evaluation, and the JSON report.
//!
//! The report has four top-level keys: `config` (the configuration used),
//! `pairs` (one entry per manifest row), `aggregate`, and `provenance`.
//! Keys are sorted and floats are rounded to 6 significant digits unless the
//! report is written in precise mode. The config echo is never rounded, so it
//! always parses back to the configuration that produced the report.
//!
//! Corpus aggregation:
//!
//! * frame: scores are means of the per-pair scores weighted by frame count;
//!   confusion matrices are summed;
//! * action: P/R/F1 recomputed from the summed confusion matrix;
//! * gesture: interval scores from every pair pooled, so MSEs are
//!   duration-weighted across the corpus; frame counts are summed.
//!
//! Pairs are reduced in `(reference, estimate)` order, so the aggregate does
//! not depend on manifest order.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::action::{
    classify_frame_actions, evaluate_actions, segments_from_states, ActionReport, ActionSegment,
};
use crate::config::EvalConfig;
use crate::confusion::{ClassScores, ConfusionMatrix, Scores, Summary};
use crate::curve::{align, resample, AlignedPair, PedalCurve};
use crate::error::{PedalError, Result};
use crate::frame::{evaluate_frames, FrameReport};
use crate::io::{load_curve_bytes, CurveFormat};
use crate::shape::{evaluate_gestures, GestureReport, IntervalScore};

pub const TOOL_NAME: &str = "pedal-eval";

/// Which evaluators to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Levels {
    pub frame: bool,
    pub action: bool,
    pub gesture: bool,
}

impl Levels {
    pub const ALL: Levels = Levels {
        frame: true,
        action: true,
        gesture: true,
    };
    pub const FRAME: Levels = Levels {
        frame: true,
        action: false,
        gesture: false,
    };
    pub const ACTION: Levels = Levels {
        frame: false,
        action: true,
        gesture: false,
    };
    pub const GESTURE: Levels = Levels {
        frame: false,
        action: false,
        gesture: true,
    };
}

impl Default for Levels {
    fn default() -> Self {
        Self::ALL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalOptions {
    pub levels: Levels,
    /// Keep aligned curves, action segments, and interval scores in the report.
    pub detail: bool,
    /// Record the wall-clock time in the provenance block. Off by default so
    /// repeated runs stay byte-identical.
    pub timestamp: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSegments {
    pub reference: Vec<ActionSegment>,
    pub estimate: Vec<ActionSegment>,
}

/// Per-frame data behind a pair's scores, for plotting and CSV dumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDetail {
    pub frame_rate_hz: f64,
    pub reference: Vec<f64>,
    pub estimate: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_segments: Option<ActionSegments>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<IntervalScore>>,
}

/// Scores for one aligned pair.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PairScores {
    pub n_frames: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gesture: Option<GestureReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<PairDetail>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub reference: String,
    pub estimate: String,
    pub status: PairStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(flatten)]
    pub scores: PairScores,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Aggregate {
    pub n_pairs: u64,
    pub n_failed: u64,
    pub n_frames: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gesture: Option<GestureReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// SHA-256 of every input that could be read, keyed by path as given.
    pub input_digests: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_unix_seconds: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: EvalConfig,
    pub pairs: Vec<PairEntry>,
    pub aggregate: Aggregate,
    pub provenance: Provenance,
}

impl EvalReport {
    pub fn any_failed(&self) -> bool {
        self.aggregate.n_failed > 0
    }

    /// 0 when every pair was evaluated, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.any_failed())
    }

    /// Serializes with sorted keys and, unless `precise`, 6 significant digits.
    pub fn to_json(&self, precise: bool) -> String {
        let mut doc = serde_json::to_value(self).expect("report serializes");
        if !precise {
            if let Value::Object(map) = &mut doc {
                for (key, v) in map.iter_mut() {
                    if key != "config" {
                        round_floats(v);
                    }
                }
            }
        }
        let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes)
            .map_err(|e| PedalError::Schema(format!("not an evaluation report: {e}")))
    }
}

/// Rounds a float to 6 significant digits.
pub fn round_sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().expect("formatted float parses")
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            *v = serde_json::Number::from_f64(round_sig6(x)).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Runs the selected evaluators on an aligned pair.
pub fn evaluate_aligned(
    pair: &AlignedPair,
    config: &EvalConfig,
    options: &EvalOptions,
) -> Result<PairScores> {
    config.validate()?;
    let levels = options.levels;
    let frame = levels
        .frame
        .then(|| evaluate_frames(pair, &config.frame))
        .transpose()?;
    let action = levels
        .action
        .then(|| evaluate_actions(pair, &config.action))
        .transpose()?;
    let gesture = levels
        .gesture
        .then(|| evaluate_gestures(pair, &config.gesture, &config.shape))
        .transpose()?;

    let detail = if options.detail {
        let action_segments = if levels.action {
            Some(ActionSegments {
                reference: segments_from_states(&classify_frame_actions(
                    pair.reference().values(),
                    &config.action,
                ))?,
                estimate: segments_from_states(&classify_frame_actions(
                    pair.estimate().values(),
                    &config.action,
                ))?,
            })
        } else {
            None
        };
        Some(PairDetail {
            frame_rate_hz: pair.frame_rate_hz(),
            reference: pair.reference().values().to_vec(),
            estimate: pair.estimate().values().to_vec(),
            action_segments,
            intervals: gesture.as_ref().map(|g| g.intervals.clone()),
        })
    } else {
        None
    };

    Ok(PairScores {
        n_frames: pair.len() as u64,
        frame,
        action,
        gesture,
        detail,
    })
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn load_input(path: &Path, rate: f64) -> (Option<String>, Result<PedalCurve>) {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(source) => {
            return (
                None,
                Err(PedalError::Io {
                    path: path.to_path_buf(),
                    source,
                }),
            )
        }
    };
    let curve = CurveFormat::from_path(path)
        .and_then(|format| load_curve_bytes(&bytes, format, rate))
        .and_then(|c| resample(&c, rate))
        .map(|c| c.with_source_id(path.display().to_string()))
        .map_err(|e| e.in_file(path));
    (Some(sha256_hex(&bytes)), curve)
}

type Digests = Vec<(String, String)>;

/// Loads both inputs; digests are keyed by `labels`, which name the paths as
/// the user wrote them.
fn load_both(
    paths: [&Path; 2],
    labels: [&str; 2],
    rate: f64,
) -> (Digests, Result<(PedalCurve, PedalCurve)>) {
    let (rd, rc) = load_input(paths[0], rate);
    let (ed, ec) = load_input(paths[1], rate);
    let digests = [(labels[0], rd), (labels[1], ed)]
        .into_iter()
        .filter_map(|(label, d)| d.map(|d| (label.to_string(), d)))
        .collect();
    (digests, rc.and_then(|r| ec.map(|e| (r, e))))
}

/// Loads, resamples to the configured rate, aligns, and evaluates two files.
pub fn evaluate_pair(
    reference: &Path,
    estimate: &Path,
    config: &EvalConfig,
    options: &EvalOptions,
) -> Result<PairScores> {
    config.validate()?;
    let labels = [
        reference.display().to_string(),
        estimate.display().to_string(),
    ];
    let (_, loaded) = load_both(
        [reference, estimate],
        [&labels[0], &labels[1]],
        config.io.frame_rate_hz,
    );
    let (r, e) = loaded?;
    let pair = align(&r, &e, config.io.align_policy)?;
    evaluate_aligned(&pair, config, options)
}

/// One manifest row. Paths are relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub reference: String,
    pub estimate: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    pub base_dir: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    /// Parses CSV with header `reference,estimate`.
    pub fn parse(bytes: &[u8], base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(bytes);
        let headers = reader
            .headers()
            .map_err(|e| PedalError::Parse {
                line: 1,
                message: e.to_string(),
            })?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["reference", "estimate"] {
            return Err(PedalError::Parse {
                line: 1,
                message: "manifest header must be `reference,estimate`".into(),
            });
        }
        let mut entries = Vec::new();
        for row in reader.deserialize() {
            let entry: ManifestEntry = row.map_err(|e| PedalError::Parse {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            entries.push(entry);
        }
        if entries.is_empty() {
            return Err(PedalError::EmptyInput("manifest lists no pairs".into()));
        }
        Ok(Self {
            base_dir: base_dir.into(),
            entries,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|source| PedalError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&bytes, base).map_err(|e| e.in_file(path))
    }

    pub fn single(reference: impl Into<String>, estimate: impl Into<String>) -> Self {
        Self {
            base_dir: PathBuf::new(),
            entries: vec![ManifestEntry {
                reference: reference.into(),
                estimate: estimate.into(),
            }],
        }
    }

    fn resolve(&self, p: &str) -> PathBuf {
        self.base_dir.join(p)
    }
}

/// Evaluates every manifest pair, in parallel, and assembles the report.
///
/// A failing pair is recorded with its error and the run continues.
pub fn evaluate_corpus(
    manifest: &Manifest,
    config: &EvalConfig,
    options: &EvalOptions,
) -> Result<EvalReport> {
    config.validate()?;
    let rate = config.io.frame_rate_hz;
    let results: Vec<(Vec<(String, String)>, PairEntry)> = manifest
        .entries
        .par_iter()
        .map(|entry| {
            let (digests, loaded) = load_both(
                [
                    &manifest.resolve(&entry.reference),
                    &manifest.resolve(&entry.estimate),
                ],
                [&entry.reference, &entry.estimate],
                rate,
            );
            let scores = loaded.and_then(|(r, e)| {
                let pair = align(&r, &e, config.io.align_policy)?;
                evaluate_aligned(&pair, config, options)
            });
            let pair_entry = match scores {
                Ok(scores) => PairEntry {
                    reference: entry.reference.clone(),
                    estimate: entry.estimate.clone(),
                    status: PairStatus::Ok,
                    error: None,
                    scores,
                },
                Err(e) => PairEntry {
                    reference: entry.reference.clone(),
                    estimate: entry.estimate.clone(),
                    status: PairStatus::Failed,
                    error: Some(e.to_string()),
                    scores: PairScores::default(),
                },
            };
            (digests, pair_entry)
        })
        .collect();

    let mut input_digests = BTreeMap::new();
    let mut pairs = Vec::with_capacity(results.len());
    for (digests, entry) in results {
        input_digests.extend(digests);
        pairs.push(entry);
    }
    let aggregate = aggregate(&pairs)?;
    let generated_unix_seconds = options.timestamp.then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs())
    });
    Ok(EvalReport {
        config: *config,
        pairs,
        aggregate,
        provenance: Provenance {
            tool: TOOL_NAME.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_digests,
            generated_unix_seconds,
        },
    })
}

fn weighted_mean(items: &[(f64, f64)]) -> f64 {
    let total: f64 = items.iter().map(|(w, _)| w).sum();
    items.iter().map(|(w, x)| w * x).sum::<f64>() / total
}

fn mean_scores(items: &[(f64, Scores)]) -> Scores {
    let pick = |f: fn(&Scores) -> f64| {
        weighted_mean(&items.iter().map(|(w, s)| (*w, f(s))).collect::<Vec<_>>())
    };
    Scores {
        precision: pick(|s| s.precision),
        recall: pick(|s| s.recall),
        f1: pick(|s| s.f1),
    }
}

fn mean_summary(items: &[(f64, &Summary)]) -> Summary {
    let weighted = mean_scores(
        &items
            .iter()
            .map(|(w, s)| (*w, s.weighted))
            .collect::<Vec<_>>(),
    );
    let macro_avg = mean_scores(
        &items
            .iter()
            .map(|(w, s)| (*w, s.macro_avg))
            .collect::<Vec<_>>(),
    );
    let n_classes = items.first().map_or(0, |(_, s)| s.per_class.len());
    let per_class = (0..n_classes)
        .map(|c| {
            let present: Vec<(f64, ClassScores)> = items
                .iter()
                .filter_map(|(w, s)| s.per_class[c].map(|cs| (*w, cs)))
                .collect();
            if present.is_empty() {
                return None;
            }
            let pick = |f: fn(&ClassScores) -> f64| {
                weighted_mean(&present.iter().map(|(w, s)| (*w, f(s))).collect::<Vec<_>>())
            };
            Some(ClassScores {
                precision: pick(|s| s.precision),
                recall: pick(|s| s.recall),
                f1: pick(|s| s.f1),
                support: present.iter().map(|(_, s)| s.support).sum(),
                predicted: present.iter().map(|(_, s)| s.predicted).sum(),
            })
        })
        .collect();
    Summary {
        weighted,
        macro_avg,
        per_class,
    }
}

fn sum_confusions<'a>(
    matrices: impl Iterator<Item = &'a ConfusionMatrix>,
) -> Result<Option<ConfusionMatrix>> {
    let mut total: Option<ConfusionMatrix> = None;
    for m in matrices {
        match &mut total {
            Some(t) => t.merge(m)?,
            None => total = Some(m.clone()),
        }
    }
    Ok(total)
}

fn aggregate_frames(reports: &[&FrameReport]) -> Result<Option<FrameReport>> {
    let Some(first) = reports.first() else {
        return Ok(None);
    };
    let n_frames: u64 = reports.iter().map(|r| r.n_frames).sum();
    // Weights n_i / N are exactly 1 for a single pair.
    let w: Vec<f64> = reports
        .iter()
        .map(|r| r.n_frames as f64 / n_frames as f64)
        .collect();
    let summaries = |f: fn(&FrameReport) -> &Summary| {
        mean_summary(
            &w.iter()
                .zip(reports)
                .map(|(&w, r)| (w, f(r)))
                .collect::<Vec<_>>(),
        )
    };
    let errors = |f: fn(&FrameReport) -> f64| {
        weighted_mean(
            &w.iter()
                .zip(reports)
                .map(|(&w, r)| (w, f(r)))
                .collect::<Vec<_>>(),
        )
    };
    Ok(Some(FrameReport {
        n_frames,
        binary_threshold: first.binary_threshold,
        fourclass_edges: first.fourclass_edges.clone(),
        binary: summaries(|r| &r.binary),
        fourclass: summaries(|r| &r.fourclass),
        binary_confusion: sum_confusions(reports.iter().map(|r| &r.binary_confusion))?
            .expect("non-empty"),
        fourclass_confusion: sum_confusions(reports.iter().map(|r| &r.fourclass_confusion))?
            .expect("non-empty"),
        mse: errors(|r| r.mse),
        mae: errors(|r| r.mae),
    }))
}

fn aggregate_gestures(reports: &[&GestureReport]) -> Option<GestureReport> {
    if reports.is_empty() {
        return None;
    }
    let sum_counts = |f: fn(&GestureReport) -> &BTreeMap<_, u64>| {
        let mut total = BTreeMap::new();
        for r in reports {
            for (&c, &n) in f(r) {
                *total.entry(c).or_insert(0) += n;
            }
        }
        total
    };
    let intervals: Vec<IntervalScore> = reports
        .iter()
        .flat_map(|r| r.intervals.iter().copied())
        .collect();
    Some(GestureReport::from_parts(
        intervals,
        sum_counts(|r| &r.frame_counts_reference),
        sum_counts(|r| &r.frame_counts_estimate),
    ))
}

/// Reduces evaluated pairs into corpus aggregates.
pub fn aggregate(pairs: &[PairEntry]) -> Result<Aggregate> {
    let mut ok: Vec<&PairEntry> = pairs
        .iter()
        .filter(|p| p.status == PairStatus::Ok)
        .collect();
    ok.sort_by(|a, b| (&a.reference, &a.estimate).cmp(&(&b.reference, &b.estimate)));

    let frames: Vec<&FrameReport> = ok.iter().filter_map(|p| p.scores.frame.as_ref()).collect();
    let actions = sum_confusions(
        ok.iter()
            .filter_map(|p| p.scores.action.as_ref().map(|a| &a.confusion)),
    )?;
    let gestures: Vec<&GestureReport> = ok
        .iter()
        .filter_map(|p| p.scores.gesture.as_ref())
        .collect();

    Ok(Aggregate {
        n_pairs: pairs.len() as u64,
        n_failed: (pairs.len() - ok.len()) as u64,
        n_frames: ok.iter().map(|p| p.scores.n_frames).sum(),
        frame: aggregate_frames(&frames)?,
        action: actions.map(ActionReport::from_confusion).transpose()?,
        gesture: aggregate_gestures(&gestures),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::AlignPolicy;

    fn curve(values: Vec<f64>) -> PedalCurve {
        PedalCurve::new(100.0, values, "t").unwrap()
    }

    fn entry(name: &str, r: Vec<f64>, e: Vec<f64>) -> PairEntry {
        let pair = align(&curve(r), &curve(e), AlignPolicy::Strict).unwrap();
        PairEntry {
            reference: name.into(),
            estimate: name.into(),
            status: PairStatus::Ok,
            error: None,
            scores: evaluate_aligned(&pair, &EvalConfig::default(), &EvalOptions::default())
                .unwrap(),
        }
    }

    fn wave(n: usize, phase: f64) -> Vec<f64> {
        (0..n)
            .map(|i| 0.5 + 0.45 * ((i as f64 / 17.0) + phase).sin())
            .collect()
    }

    #[test]
    fn single_pair_aggregate_equals_pair() {
        let p = entry("a", wave(300, 0.0), wave(300, 0.4));
        let agg = aggregate(std::slice::from_ref(&p)).unwrap();
        assert_eq!(agg.frame.as_ref(), p.scores.frame.as_ref());
        assert_eq!(agg.action.as_ref(), p.scores.action.as_ref());
        assert_eq!(agg.gesture.as_ref(), p.scores.gesture.as_ref());
    }

    #[test]
    fn aggregate_is_order_free() {
        let a = entry("a", wave(300, 0.0), wave(300, 0.4));
        let b = entry("b", wave(150, 1.0), wave(150, 0.2));
        let c = entry("c", wave(420, 2.0), wave(420, 2.3));
        let x = aggregate(&[a.clone(), b.clone(), c.clone()]).unwrap();
        let y = aggregate(&[c, a, b]).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn failures_counted() {
        let mut bad = entry("z", wave(50, 0.0), wave(50, 0.0));
        bad.status = PairStatus::Failed;
        bad.scores = PairScores::default();
        let agg = aggregate(&[entry("a", wave(50, 0.0), wave(50, 0.1)), bad]).unwrap();
        assert_eq!((agg.n_pairs, agg.n_failed), (2, 1));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_sig6(0.123456789), 0.123457);
        assert_eq!(round_sig6(1234567.0), 1234570.0);
        assert_eq!(round_sig6(0.0), 0.0);
        assert_eq!(round_sig6(1.0), 1.0);
    }

    #[test]
    fn manifest_header_required() {
        assert!(Manifest::parse(b"reference,estimate\na.csv,b.csv\n", "").is_ok());
        assert!(Manifest::parse(b"ref,est\na.csv,b.csv\n", "").is_err());
        assert!(Manifest::parse(b"reference,estimate\n", "").is_err());
    }
}
