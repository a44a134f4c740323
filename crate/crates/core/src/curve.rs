//! Pedal depth curves and frame-aligned curve pairs.

use serde::{Deserialize, Serialize};

use crate::error::{PedalError, Result};

/// Frame rate assumed throughout: 500 frames per 5 s window.
pub const DEFAULT_FRAME_RATE_HZ: f64 = 100.0;

/// Slack used when mapping event times onto the frame grid, so that an event
/// landing on a sample instant is not pushed to the next frame by rounding.
const GRID_SLACK: f64 = 1e-9;

/// A pedal depth signal sampled at a fixed frame rate.
///
/// Every value lies in `[0, 1]`, the rate is positive, and there is at least
/// one frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PedalCurve {
    frame_rate_hz: f64,
    values: Vec<f64>,
    source_id: String,
}

impl PedalCurve {
    pub fn new(frame_rate_hz: f64, values: Vec<f64>, source_id: impl Into<String>) -> Result<Self> {
        check_rate(frame_rate_hz)?;
        if values.is_empty() {
            return Err(PedalError::EmptyInput("curve has no frames".into()));
        }
        if let Some((i, &v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && (0.0..=1.0).contains(*v)))
        {
            return Err(PedalError::Range {
                location: format!("values[{i}]"),
                value: v,
            });
        }
        Ok(Self {
            frame_rate_hz,
            values,
            source_id: source_id.into(),
        })
    }

    pub fn frame_rate_hz(&self) -> f64 {
        self.frame_rate_hz
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn with_source_id(mut self, source_id: impl Into<String>) -> Self {
        self.source_id = source_id.into();
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time of the last frame, in seconds.
    pub fn duration_seconds(&self) -> f64 {
        (self.len() - 1) as f64 / self.frame_rate_hz
    }

    fn truncated(&self, len: usize) -> Self {
        Self {
            frame_rate_hz: self.frame_rate_hz,
            values: self.values[..len].to_vec(),
            source_id: self.source_id.clone(),
        }
    }
}

pub(crate) fn check_rate(frame_rate_hz: f64) -> Result<()> {
    if frame_rate_hz.is_finite() && frame_rate_hz > 0.0 {
        Ok(())
    } else {
        Err(PedalError::Parameter(format!(
            "frame rate must be positive and finite, got {frame_rate_hz}"
        )))
    }
}

/// Number of frames needed to cover `[0, duration_seconds]` inclusive.
pub(crate) fn frames_covering(duration_seconds: f64, frame_rate_hz: f64) -> usize {
    (duration_seconds * frame_rate_hz + GRID_SLACK)
        .floor()
        .max(0.0) as usize
        + 1
}

/// First frame whose sample instant is at or after `t_seconds`.
pub(crate) fn first_frame_at_or_after(t_seconds: f64, frame_rate_hz: f64) -> usize {
    (t_seconds * frame_rate_hz - GRID_SLACK).ceil().max(0.0) as usize
}

/// Samples a right-continuous step function defined by `(time, value)` events.
///
/// Events must be sorted by time; among events at the same time the later one
/// wins. The value is 0 before the first event.
pub(crate) fn sample_and_hold(
    events: &[(f64, f64)],
    n_frames: usize,
    frame_rate_hz: f64,
) -> Vec<f64> {
    let mut out = vec![0.0; n_frames];
    let mut current = 0.0;
    let mut next = 0;
    for (frame, slot) in out.iter_mut().enumerate() {
        while next < events.len() && first_frame_at_or_after(events[next].0, frame_rate_hz) <= frame
        {
            current = events[next].1;
            next += 1;
        }
        *slot = current;
    }
    out
}

/// Linear resampling onto a new frame grid over the same time span.
///
/// Output frames sit at multiples of `1 / target_rate_hz` up to the original
/// duration, so the first sample is always kept and the last one is kept
/// whenever the span lands on the new grid.
pub fn resample(curve: &PedalCurve, target_rate_hz: f64) -> Result<PedalCurve> {
    check_rate(target_rate_hz)?;
    if target_rate_hz == curve.frame_rate_hz {
        return Ok(curve.clone());
    }
    if curve.len() < 2 {
        return Err(PedalError::InsufficientData(
            "resampling needs at least two frames".into(),
        ));
    }
    let src = curve.values();
    let last = src.len() - 1;
    let n_out = frames_covering(curve.duration_seconds(), target_rate_hz);
    let values = (0..n_out)
        .map(|k| {
            // Position on the source grid, in source frames.
            let pos = k as f64 * curve.frame_rate_hz / target_rate_hz;
            let i = (pos.floor() as usize).min(last);
            let frac = pos - i as f64;
            let v = if i == last || frac <= 0.0 {
                src[i]
            } else {
                src[i] + (src[i + 1] - src[i]) * frac
            };
            v.clamp(0.0, 1.0)
        })
        .collect();
    PedalCurve::new(target_rate_hz, values, curve.source_id.clone())
}

/// How to reconcile curves of different lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignPolicy {
    /// Cut both curves to the shorter length.
    #[default]
    Truncate,
    /// Require equal lengths.
    Strict,
}

impl std::str::FromStr for AlignPolicy {
    type Err = PedalError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "truncate" => Ok(Self::Truncate),
            "strict" => Ok(Self::Strict),
            other => Err(PedalError::InvalidConfig(format!(
                "unknown align policy `{other}` (expected truncate or strict)"
            ))),
        }
    }
}

/// A reference curve and an estimate with identical rate and length.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair {
    reference: PedalCurve,
    estimate: PedalCurve,
}

impl AlignedPair {
    pub fn reference(&self) -> &PedalCurve {
        &self.reference
    }

    pub fn estimate(&self) -> &PedalCurve {
        &self.estimate
    }

    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn frame_rate_hz(&self) -> f64 {
        self.reference.frame_rate_hz
    }

    /// Iterator over `(reference, estimate)` values frame by frame.
    pub fn frames(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.reference
            .values
            .iter()
            .copied()
            .zip(self.estimate.values.iter().copied())
    }
}

/// Pairs two curves sampled at the same rate.
pub fn align(
    reference: &PedalCurve,
    estimate: &PedalCurve,
    policy: AlignPolicy,
) -> Result<AlignedPair> {
    if reference.frame_rate_hz != estimate.frame_rate_hz {
        return Err(PedalError::RateMismatch {
            reference: reference.frame_rate_hz,
            estimate: estimate.frame_rate_hz,
        });
    }
    let (r, e) = (reference.len(), estimate.len());
    if r != e && policy == AlignPolicy::Strict {
        return Err(PedalError::LengthMismatch {
            reference: r,
            estimate: e,
        });
    }
    let len = r.min(e);
    Ok(AlignedPair {
        reference: reference.truncated(len),
        estimate: estimate.truncated(len),
    })
}
