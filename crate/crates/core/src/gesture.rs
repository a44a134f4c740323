//! Gesture segmentation and the pinnacle / hill / highland / mountain taxonomy.
//!
//! A gesture is a maximal run of frames whose depth is strictly above
//! `epsilon`. Everything else is `plain`. Gestures are placed on a duration
//! axis (long when at least `duration_threshold_frames`) and a max-depth ratio
//! axis (high when at least `ratio_split`), giving four shapes:
//!
//! | | high ratio | low ratio |
//! |---|---|---|
//! | short | pinnacle | hill |
//! | long | highland | mountain |

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{PedalError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GestureCategory {
    Pinnacle,
    Hill,
    Highland,
    Mountain,
    Plain,
}

impl GestureCategory {
    pub const ALL: [GestureCategory; 5] = [
        GestureCategory::Pinnacle,
        GestureCategory::Hill,
        GestureCategory::Highland,
        GestureCategory::Mountain,
        GestureCategory::Plain,
    ];

    pub const SHAPES: [GestureCategory; 4] = [
        GestureCategory::Pinnacle,
        GestureCategory::Hill,
        GestureCategory::Highland,
        GestureCategory::Mountain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GestureCategory::Pinnacle => "pinnacle",
            GestureCategory::Hill => "hill",
            GestureCategory::Highland => "highland",
            GestureCategory::Mountain => "mountain",
            GestureCategory::Plain => "plain",
        }
    }
}

impl fmt::Display for GestureCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for GestureCategory {
    type Err = PedalError;

    fn from_str(s: &str) -> Result<Self> {
        GestureCategory::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| PedalError::Parameter(format!("unknown gesture category `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GestureConfig {
    /// Depth a frame must exceed to belong to a gesture.
    pub epsilon: f64,
    /// Fraction of the gesture maximum that counts as "near max".
    pub theta: f64,
    /// Ratio at or above which a gesture is "high ratio"; defaults to `theta`.
    pub ratio_split: f64,
    pub duration_threshold_frames: usize,
}

impl Default for GestureConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            theta: 0.65,
            ratio_split: 0.65,
            duration_threshold_frames: 100,
        }
    }
}

impl GestureConfig {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(PedalError::InvalidConfig(format!(
                    "gesture.{name} must be in (0, 1), got {v}"
                )))
            }
        };
        open_unit("epsilon", self.epsilon)?;
        open_unit("theta", self.theta)?;
        open_unit("ratio_split", self.ratio_split)?;
        if self.duration_threshold_frames == 0 {
            return Err(PedalError::InvalidConfig(
                "gesture.duration_threshold_frames must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// An inclusive frame interval with its category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub category: GestureCategory,
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gesture {
    pub start_frame: usize,
    /// Inclusive.
    pub end_frame: usize,
    pub values: Vec<f64>,
    pub category: GestureCategory,
    pub max_depth: f64,
    pub max_depth_ratio: f64,
}

impl Gesture {
    pub fn duration_frames(&self) -> usize {
        self.values.len()
    }

    pub fn interval(&self) -> Interval {
        Interval {
            category: self.category,
            start: self.start_frame,
            end: self.end_frame,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Segmentation {
    pub gestures: Vec<Gesture>,
    pub plain_intervals: Vec<Interval>,
}

impl Segmentation {
    /// Gestures and plain intervals in frame order; they tile the curve.
    pub fn intervals(&self) -> Vec<Interval> {
        let mut all: Vec<Interval> = self
            .gestures
            .iter()
            .map(Gesture::interval)
            .chain(self.plain_intervals.iter().copied())
            .collect();
        all.sort_by_key(|i| i.start);
        all
    }

    /// Frames per category, all five categories present.
    pub fn frame_counts(&self) -> BTreeMap<GestureCategory, u64> {
        let mut counts: BTreeMap<GestureCategory, u64> =
            GestureCategory::ALL.iter().map(|&c| (c, 0)).collect();
        for i in self.intervals() {
            *counts.get_mut(&i.category).expect("all categories") += i.len() as u64;
        }
        counts
    }
}

/// Fraction of frames at or above `theta` times the slice maximum.
pub fn max_depth_ratio(values: &[f64], theta: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cut = theta * max;
    values.iter().filter(|&&v| v >= cut).count() as f64 / values.len() as f64
}

pub fn classify(duration_frames: usize, ratio: f64, config: &GestureConfig) -> GestureCategory {
    let long = duration_frames >= config.duration_threshold_frames;
    let high = ratio >= config.ratio_split;
    match (long, high) {
        (false, true) => GestureCategory::Pinnacle,
        (false, false) => GestureCategory::Hill,
        (true, true) => GestureCategory::Highland,
        (true, false) => GestureCategory::Mountain,
    }
}

pub fn classify_gesture(gesture: &Gesture, config: &GestureConfig) -> GestureCategory {
    classify(gesture.duration_frames(), gesture.max_depth_ratio, config)
}

fn make_gesture(values: &[f64], start: usize, end: usize, config: &GestureConfig) -> Gesture {
    let slice = values[start..=end].to_vec();
    let max_depth = slice.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ratio = max_depth_ratio(&slice, config.theta);
    Gesture {
        start_frame: start,
        end_frame: end,
        category: classify(slice.len(), ratio, config),
        values: slice,
        max_depth,
        max_depth_ratio: ratio,
    }
}

/// Splits a depth sequence into gestures and plain intervals.
///
/// Gestures touching either end of the sequence are kept.
pub fn segment_gestures(values: &[f64], config: &GestureConfig) -> Segmentation {
    let mut seg = Segmentation::default();
    let mut run_start = 0;
    for i in 1..=values.len() {
        let boundary = i == values.len()
            || (values[i] > config.epsilon) != (values[run_start] > config.epsilon);
        if !boundary {
            continue;
        }
        let end = i - 1;
        if values[run_start] > config.epsilon {
            seg.gestures
                .push(make_gesture(values, run_start, end, config));
        } else {
            seg.plain_intervals.push(Interval {
                category: GestureCategory::Plain,
                start: run_start,
                end,
            });
        }
        run_start = i;
    }
    seg
}

/// Share of frames per category, with every category present.
pub fn distribution_from_counts(
    counts: &BTreeMap<GestureCategory, u64>,
) -> BTreeMap<GestureCategory, f64> {
    let total: u64 = counts.values().sum();
    counts
        .iter()
        .map(|(&c, &n)| {
            (
                c,
                if total == 0 {
                    0.0
                } else {
                    n as f64 / total as f64
                },
            )
        })
        .collect()
}

pub fn gesture_distribution(
    values: &[f64],
    config: &GestureConfig,
) -> BTreeMap<GestureCategory, f64> {
    distribution_from_counts(&segment_gestures(values, config).frame_counts())
}

/// Renders gestures as `category,start_frame,end_frame,max_depth,ratio` CSV.
pub fn gestures_csv(gestures: &[Gesture]) -> String {
    let mut out = String::from("category,start_frame,end_frame,max_depth,ratio\n");
    for g in gestures {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            g.category, g.start_frame, g.end_frame, g.max_depth, g.max_depth_ratio
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use GestureCategory::*;

    #[test]
    fn all_zero_curve_is_plain() {
        let seg = segment_gestures(&[0.0; 10], &GestureConfig::default());
        assert!(seg.gestures.is_empty());
        assert_eq!(
            seg.plain_intervals,
            vec![Interval {
                category: Plain,
                start: 0,
                end: 9
            }]
        );
        let d = gesture_distribution(&[0.0; 10], &GestureConfig::default());
        assert_eq!(d[&Plain], 1.0);
        assert_eq!(d[&Highland], 0.0);
    }

    #[test]
    fn simple_gesture() {
        let seg = segment_gestures(&[0.0, 0.5, 0.5, 0.0], &GestureConfig::default());
        assert_eq!(seg.gestures.len(), 1);
        assert_eq!(
            (seg.gestures[0].start_frame, seg.gestures[0].end_frame),
            (1, 2)
        );
        assert_eq!(seg.plain_intervals.len(), 2);
    }

    #[test]
    fn epsilon_itself_is_plain_and_edge_gestures_kept() {
        let seg = segment_gestures(&[0.3, 0.05, 0.06], &GestureConfig::default());
        let spans: Vec<_> = seg
            .intervals()
            .iter()
            .map(|i| (i.category, i.start, i.end))
            .collect();
        assert_eq!(
            spans,
            vec![(Pinnacle, 0, 0), (Plain, 1, 1), (Pinnacle, 2, 2)]
        );
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(max_depth_ratio(&[0.4; 20], 0.65), 1.0);
        assert_eq!(max_depth_ratio(&[0.4], 0.65), 1.0);
        // Triangle with m = 100: j / m >= 0.65 for j in 65..=100 on each side.
        let m = 100;
        let tri: Vec<f64> = (0..=2 * m)
            .map(|i| {
                let j = if i <= m { i } else { 2 * m - i };
                j as f64 / m as f64
            })
            .collect();
        let expected = (2 * 36 - 1) as f64 / (2 * m + 1) as f64;
        assert_eq!(max_depth_ratio(&tri, 0.65), expected);
        assert!((expected - 0.35).abs() < 0.01);
    }

    #[test]
    fn quadrants_and_ties() {
        let cfg = GestureConfig::default();
        assert_eq!(classify(150, 0.9, &cfg), Highland);
        assert_eq!(classify(40, 0.3, &cfg), Hill);
        assert_eq!(classify(100, 0.65, &cfg), Highland);
        assert_eq!(classify(99, 0.65, &cfg), Pinnacle);
        assert_eq!(classify(100, 0.6499, &cfg), Mountain);
        assert_eq!(classify(1, 1.0, &cfg), Pinnacle);
    }

    #[test]
    fn distribution_frame_counting() {
        let mut v = vec![0.0; 1000];
        for x in &mut v[200..500] {
            *x = 0.8;
        }
        let d = gesture_distribution(&v, &GestureConfig::default());
        assert_eq!(d[&Highland], 0.3);
        assert_eq!(d[&Plain], 0.7);
        assert!((d.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn category_names_parse() {
        for c in GestureCategory::ALL {
            assert_eq!(c.name().parse::<GestureCategory>().unwrap(), c);
        }
        assert!("valley".parse::<GestureCategory>().is_err());
    }
}
