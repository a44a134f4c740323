//! Press / hold / release states from sliding-window linear regression.
//!
//! Each frame gets the slope and coefficient of determination of an ordinary
//! least-squares line fitted over a window centred on it. Windows are clipped
//! at the sequence boundaries, so edge frames use fewer points. A frame is a
//! press when the slope exceeds the threshold with a good enough fit, a
//! release for the mirror case, and a hold otherwise.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::confusion::{ClassScores, ConfusionMatrix};
use crate::curve::AlignedPair;
use crate::error::{PedalError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionState {
    Press,
    Hold,
    Release,
}

impl ActionState {
    pub const ALL: [ActionState; 3] = [ActionState::Press, ActionState::Hold, ActionState::Release];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ActionState::Press => "press",
            ActionState::Hold => "hold",
            ActionState::Release => "release",
        }
    }

    /// Mirror image under time reversal.
    pub fn reversed(self) -> Self {
        match self {
            ActionState::Press => ActionState::Release,
            ActionState::Hold => ActionState::Hold,
            ActionState::Release => ActionState::Press,
        }
    }
}

impl fmt::Display for ActionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActionConfig {
    /// Odd window length in frames.
    pub window_frames: usize,
    /// Slope magnitude in depth units per frame.
    pub slope_threshold: f64,
    pub r2_min: f64,
}

impl Default for ActionConfig {
    fn default() -> Self {
        Self {
            window_frames: 19,
            slope_threshold: 0.005,
            r2_min: 0.5,
        }
    }
}

impl ActionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_frames < 3 || self.window_frames.is_multiple_of(2) {
            return Err(PedalError::InvalidConfig(format!(
                "action.window_frames must be odd and at least 3, got {}",
                self.window_frames
            )));
        }
        if !(self.slope_threshold.is_finite() && self.slope_threshold > 0.0) {
            return Err(PedalError::InvalidConfig(format!(
                "action.slope_threshold must be positive, got {}",
                self.slope_threshold
            )));
        }
        if !(0.0..=1.0).contains(&self.r2_min) {
            return Err(PedalError::InvalidConfig(format!(
                "action.r2_min must be in [0, 1], got {}",
                self.r2_min
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowFit {
    /// Depth change per frame.
    pub slope: f64,
    pub r2: f64,
}

/// Inclusive frame range of the clipped window around `center`.
pub fn window_bounds(len: usize, center: usize, window_frames: usize) -> (usize, usize) {
    let half = window_frames / 2;
    (center.saturating_sub(half), (center + half).min(len - 1))
}

/// Least-squares fit of value against frame index over the clipped window.
///
/// A constant window (including a single point) has slope 0 and r2 0.
pub fn window_fit(values: &[f64], center: usize, window_frames: usize) -> WindowFit {
    let (lo, hi) = window_bounds(values.len(), center, window_frames);
    let window = &values[lo..=hi];
    let first = window[0];
    if window.iter().all(|&v| v == first) {
        return WindowFit {
            slope: 0.0,
            r2: 0.0,
        };
    }
    let n = window.len() as f64;
    // Frame offsets relative to the window start; slope is shift-invariant.
    let x_mean = (n - 1.0) / 2.0;
    let y_mean = window.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (i, &y) in window.iter().enumerate() {
        let dx = i as f64 - x_mean;
        let dy = y - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    WindowFit { slope, r2 }
}

pub fn state_for_fit(fit: WindowFit, config: &ActionConfig) -> ActionState {
    if fit.r2 >= config.r2_min {
        if fit.slope > config.slope_threshold {
            return ActionState::Press;
        }
        if fit.slope < -config.slope_threshold {
            return ActionState::Release;
        }
    }
    ActionState::Hold
}

pub fn classify_frame_actions(values: &[f64], config: &ActionConfig) -> Vec<ActionState> {
    (0..values.len())
        .map(|t| state_for_fit(window_fit(values, t, config.window_frames), config))
        .collect()
}

/// A maximal run of frames sharing one state; `end_frame` is inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSegment {
    pub state: ActionState,
    pub start_frame: usize,
    pub end_frame: usize,
}

impl ActionSegment {
    pub fn len(&self) -> usize {
        self.end_frame - self.start_frame + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn segments_from_states(states: &[ActionState]) -> Result<Vec<ActionSegment>> {
    let Some(&first) = states.first() else {
        return Err(PedalError::EmptyInput("no action states to segment".into()));
    };
    let mut segments = vec![ActionSegment {
        state: first,
        start_frame: 0,
        end_frame: 0,
    }];
    for (i, &s) in states.iter().enumerate().skip(1) {
        let last = segments.last_mut().expect("non-empty");
        if last.state == s {
            last.end_frame = i;
        } else {
            segments.push(ActionSegment {
                state: s,
                start_frame: i,
                end_frame: i,
            });
        }
    }
    Ok(segments)
}

pub fn expand_segments(segments: &[ActionSegment]) -> Vec<ActionState> {
    segments
        .iter()
        .flat_map(|s| std::iter::repeat_n(s.state, s.len()))
        .collect()
}

/// Renders segments as `state,start_frame,end_frame` CSV.
pub fn segments_csv(segments: &[ActionSegment]) -> String {
    let mut out = String::from("state,start_frame,end_frame\n");
    for s in segments {
        out.push_str(&format!("{},{},{}\n", s.state, s.start_frame, s.end_frame));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionReport {
    /// Keyed by state name; `null` when the state occurs in neither sequence.
    pub per_class: BTreeMap<ActionState, Option<ClassScores>>,
    pub macro_f1: f64,
    pub weighted_f1: f64,
    /// Rows are reference states, columns estimated states, in press/hold/release order.
    pub confusion: ConfusionMatrix,
    /// Fraction of frames in each state.
    pub distribution_reference: BTreeMap<ActionState, f64>,
    pub distribution_estimate: BTreeMap<ActionState, f64>,
}

impl ActionReport {
    /// Scores derived from a 3x3 press/hold/release confusion matrix.
    pub fn from_confusion(confusion: ConfusionMatrix) -> Result<Self> {
        if confusion.n_classes() != 3 {
            return Err(PedalError::Parameter("action confusion must be 3x3".into()));
        }
        let summary = confusion.summary()?;
        let total = confusion.total() as f64;
        let counts = confusion.counts();
        let mut per_class = BTreeMap::new();
        let mut distribution_reference = BTreeMap::new();
        let mut distribution_estimate = BTreeMap::new();
        for s in ActionState::ALL {
            let i = s.index();
            per_class.insert(s, summary.per_class[i]);
            let reference: u64 = counts[i].iter().sum();
            let estimate: u64 = counts.iter().map(|row| row[i]).sum();
            distribution_reference.insert(s, reference as f64 / total);
            distribution_estimate.insert(s, estimate as f64 / total);
        }
        Ok(Self {
            per_class,
            macro_f1: summary.macro_avg.f1,
            weighted_f1: summary.weighted.f1,
            confusion,
            distribution_reference,
            distribution_estimate,
        })
    }

    pub fn from_states(reference: &[ActionState], estimate: &[ActionState]) -> Result<Self> {
        let r: Vec<usize> = reference.iter().map(|s| s.index()).collect();
        let e: Vec<usize> = estimate.iter().map(|s| s.index()).collect();
        Self::from_confusion(ConfusionMatrix::from_labels(&r, &e, 3)?)
    }
}

/// Frame-wise three-class comparison of the two curves' action states.
pub fn evaluate_actions(pair: &AlignedPair, config: &ActionConfig) -> Result<ActionReport> {
    config.validate()?;
    let reference = classify_frame_actions(pair.reference().values(), config);
    let estimate = classify_frame_actions(pair.estimate().values(), config);
    ActionReport::from_states(&reference, &estimate)
}
