//! Plot-ready JSON series extracted from an evaluation report.
//!
//! Documents carry labels, values, and color names only; rendering is left to
//! whatever plotting tool reads them.

use std::str::FromStr;

use serde::Serialize;

use crate::action::ActionState;
use crate::error::{PedalError, Result};
use crate::gesture::GestureCategory;
use crate::report::{EvalReport, PairEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Stacked bars of gesture category shares, reference and estimate.
    DistributionBars,
    /// Reference and estimate depth curves on a shared time axis.
    CurveOverlay,
    /// Action segments and reference gesture intervals along time.
    SegmentTimeline,
}

impl FromStr for PlotKind {
    type Err = PedalError;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "distribution_bars" => Ok(Self::DistributionBars),
            "curve_overlay" => Ok(Self::CurveOverlay),
            "segment_timeline" => Ok(Self::SegmentTimeline),
            _ => Err(PedalError::Parameter(format!(
                "unknown plot kind `{s}` (distribution_bars, curve_overlay, segment_timeline)"
            ))),
        }
    }
}

pub fn action_color(state: ActionState) -> &'static str {
    match state {
        ActionState::Press => "yellow",
        ActionState::Hold => "pink",
        ActionState::Release => "blue",
    }
}

pub fn category_color(category: GestureCategory) -> &'static str {
    match category {
        GestureCategory::Pinnacle => "crimson",
        GestureCategory::Hill => "orange",
        GestureCategory::Highland => "green",
        GestureCategory::Mountain => "purple",
        GestureCategory::Plain => "gray",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bar {
    pub label: String,
    pub value: f64,
    pub color: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StackedBar {
    pub label: String,
    /// Non-zero categories only; values sum to 1.
    pub segments: Vec<Bar>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Span {
    pub label: String,
    pub start_frame: usize,
    pub end_frame: usize,
    pub color: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Track {
    pub label: String,
    pub spans: Vec<Span>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlotDocument {
    DistributionBars {
        source: String,
        bars: Vec<StackedBar>,
    },
    CurveOverlay {
        source: String,
        frame_rate_hz: f64,
        series: Vec<Series>,
    },
    SegmentTimeline {
        source: String,
        frame_rate_hz: f64,
        tracks: Vec<Track>,
    },
}

impl PlotDocument {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("plot document serializes");
        out.push('\n');
        out
    }
}

fn pair_entry(report: &EvalReport, index: usize) -> Result<&PairEntry> {
    report.pairs.get(index).ok_or_else(|| {
        PedalError::Parameter(format!(
            "report has {} pairs, no pair {index}",
            report.pairs.len()
        ))
    })
}

fn label(entry: &PairEntry) -> String {
    format!("{} vs {}", entry.reference, entry.estimate)
}

fn bars(
    label: &str,
    distribution: &std::collections::BTreeMap<GestureCategory, f64>,
) -> StackedBar {
    StackedBar {
        label: label.to_string(),
        segments: distribution
            .iter()
            .filter(|(_, &v)| v > 0.0)
            .map(|(&c, &v)| Bar {
                label: c.to_string(),
                value: v,
                color: category_color(c),
            })
            .collect(),
    }
}

/// Builds a plot document. `pair` selects a pair by index; distribution bars
/// default to the corpus aggregate and the other kinds to the first pair.
pub fn emit_plot_data(
    report: &EvalReport,
    kind: PlotKind,
    pair: Option<usize>,
) -> Result<PlotDocument> {
    match kind {
        PlotKind::DistributionBars => {
            let (source, gesture) = match pair {
                Some(i) => {
                    let entry = pair_entry(report, i)?;
                    (label(entry), entry.scores.gesture.as_ref())
                }
                None => ("aggregate".to_string(), report.aggregate.gesture.as_ref()),
            };
            let g =
                gesture.ok_or_else(|| PedalError::NotComputed("gesture distribution".into()))?;
            Ok(PlotDocument::DistributionBars {
                source,
                bars: vec![
                    bars("reference", &g.distribution_reference),
                    bars("estimate", &g.distribution_estimate),
                ],
            })
        }
        PlotKind::CurveOverlay => {
            let entry = pair_entry(report, pair.unwrap_or(0))?;
            let detail = entry.scores.detail.as_ref().ok_or_else(|| {
                PedalError::NotComputed("curve detail (evaluate with --detail)".into())
            })?;
            Ok(PlotDocument::CurveOverlay {
                source: label(entry),
                frame_rate_hz: detail.frame_rate_hz,
                series: vec![
                    Series {
                        label: "reference".into(),
                        color: "black",
                        values: detail.reference.clone(),
                    },
                    Series {
                        label: "estimate".into(),
                        color: "red",
                        values: detail.estimate.clone(),
                    },
                ],
            })
        }
        PlotKind::SegmentTimeline => {
            let entry = pair_entry(report, pair.unwrap_or(0))?;
            let detail = entry.scores.detail.as_ref().ok_or_else(|| {
                PedalError::NotComputed("segment detail (evaluate with --detail)".into())
            })?;
            let segments = detail
                .action_segments
                .as_ref()
                .ok_or_else(|| PedalError::NotComputed("action segments".into()))?;
            let action_track = |name: &str, segs: &[crate::action::ActionSegment]| Track {
                label: name.to_string(),
                spans: segs
                    .iter()
                    .map(|s| Span {
                        label: s.state.to_string(),
                        start_frame: s.start_frame,
                        end_frame: s.end_frame,
                        color: action_color(s.state),
                    })
                    .collect(),
            };
            let mut tracks = vec![
                action_track("reference actions", &segments.reference),
                action_track("estimate actions", &segments.estimate),
            ];
            if let Some(intervals) = &detail.intervals {
                tracks.push(Track {
                    label: "reference gestures".into(),
                    spans: intervals
                        .iter()
                        .map(|i| Span {
                            label: i.category.to_string(),
                            start_frame: i.start,
                            end_frame: i.end,
                            color: category_color(i.category),
                        })
                        .collect(),
                });
            }
            Ok(PlotDocument::SegmentTimeline {
                source: label(entry),
                frame_rate_hz: detail.frame_rate_hz,
                tracks,
            })
        }
    }
}
