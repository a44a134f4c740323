//! Contour similarity over gesture intervals.
//!
//! Two measures compare the reference and estimate over the same frames:
//!
//! * Fourier: both slices are low-pass filtered by keeping DFT bins
//!   `0..k` and their conjugate mirrors, then compared by MSE. The kept bins
//!   form a conjugate-symmetric set, so the filter is an orthogonal projection
//!   onto real signals and the result can never exceed the raw MSE.
//! * Five-point: each slice is summarised as `[start, end, median, mean, max]`
//!   and the two summaries are compared by MSE.
//!
//! Intervals come from segmenting the reference curve. Per-category and
//! overall scores are frame-count weighted means of per-interval scores.

use std::collections::BTreeMap;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::curve::AlignedPair;
use crate::error::{PedalError, Result};
use crate::gesture::{
    distribution_from_counts, segment_gestures, GestureCategory, GestureConfig, Interval,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShapeConfig {
    /// Number of low-order DFT coefficients kept by the Fourier measure.
    pub fourier_k: usize,
}

impl Default for ShapeConfig {
    fn default() -> Self {
        Self { fourier_k: 11 }
    }
}

impl ShapeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fourier_k == 0 {
            return Err(PedalError::InvalidConfig(
                "shape.fourier_k must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Keeps DFT bins `0..min(k, n)` and their mirrors, and transforms back.
pub fn lowpass_reconstruct(values: &[f64], k: usize) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let kept = k.min(n);
    // Bins j and n - j for j < kept cover everything once kept > n / 2.
    if 2 * kept > n {
        return values.to_vec();
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (j, c) in buf.iter_mut().enumerate() {
        if j >= kept && n - j >= kept {
            *c = Complex::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter().map(|c| c.re * scale).collect()
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(PedalError::LengthMismatch {
            reference: a.len(),
            estimate: b.len(),
        });
    }
    if a.is_empty() {
        return Err(PedalError::EmptyInput("empty interval".into()));
    }
    Ok(())
}

pub fn raw_mse(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    check_lengths(reference, estimate)?;
    Ok(mse(reference, estimate))
}

pub fn fourier_mse(reference: &[f64], estimate: &[f64], k: usize) -> Result<f64> {
    check_lengths(reference, estimate)?;
    // The filter is linear, so filtering the difference is equivalent and
    // avoids two transforms.
    let diff: Vec<f64> = reference.iter().zip(estimate).map(|(r, e)| r - e).collect();
    let low = lowpass_reconstruct(&diff, k);
    Ok(low.iter().map(|d| d * d).sum::<f64>() / low.len() as f64)
}

/// `[start, end, median, mean, max]`; the median of an even-length slice is
/// the mean of its two middle values.
pub fn five_points(values: &[f64]) -> Result<[f64; 5]> {
    let (&first, &last) = match (values.first(), values.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => {
            return Err(PedalError::EmptyInput(
                "five-point summary of an empty slice".into(),
            ))
        }
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let mean = values.iter().sum::<f64>() / n as f64;
    Ok([first, last, median, mean, sorted[n - 1]])
}

pub fn five_point_mse(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    check_lengths(reference, estimate)?;
    Ok(mse(&five_points(reference)?, &five_points(estimate)?))
}

/// Scores for one reference interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalScore {
    pub category: GestureCategory,
    pub start: usize,
    pub end: usize,
    pub five_point_mse: f64,
    pub fourier_mse: f64,
    pub raw_mse: f64,
}

impl IntervalScore {
    pub fn frames(&self) -> usize {
        self.end - self.start + 1
    }
}

pub fn score_interval(
    pair: &AlignedPair,
    interval: Interval,
    config: &ShapeConfig,
) -> Result<IntervalScore> {
    let r = &pair.reference().values()[interval.start..=interval.end];
    let e = &pair.estimate().values()[interval.start..=interval.end];
    Ok(IntervalScore {
        category: interval.category,
        start: interval.start,
        end: interval.end,
        five_point_mse: five_point_mse(r, e)?,
        fourier_mse: fourier_mse(r, e, config.fourier_k)?,
        raw_mse: raw_mse(r, e)?,
    })
}

/// Aggregated scores for a group of intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeScores {
    pub n_intervals: u64,
    pub n_frames: u64,
    /// Frame-weighted means; `None` when the group is empty.
    pub five_point_mse: Option<f64>,
    pub fourier_mse: Option<f64>,
    pub raw_mse: Option<f64>,
    /// Plain per-interval means.
    pub five_point_mse_unweighted: Option<f64>,
    pub fourier_mse_unweighted: Option<f64>,
}

impl ShapeScores {
    pub fn from_intervals<'a>(scores: impl IntoIterator<Item = &'a IntervalScore>) -> Self {
        let scores: Vec<&IntervalScore> = scores.into_iter().collect();
        let n_intervals = scores.len() as u64;
        let n_frames: u64 = scores.iter().map(|s| s.frames() as u64).sum();
        if scores.is_empty() {
            return Self {
                n_intervals,
                n_frames,
                five_point_mse: None,
                fourier_mse: None,
                raw_mse: None,
                five_point_mse_unweighted: None,
                fourier_mse_unweighted: None,
            };
        }
        let weighted = |f: fn(&IntervalScore) -> f64| {
            Some(scores.iter().map(|s| s.frames() as f64 * f(s)).sum::<f64>() / n_frames as f64)
        };
        let unweighted = |f: fn(&IntervalScore) -> f64| {
            Some(scores.iter().map(|s| f(s)).sum::<f64>() / n_intervals as f64)
        };
        Self {
            n_intervals,
            n_frames,
            five_point_mse: weighted(|s| s.five_point_mse),
            fourier_mse: weighted(|s| s.fourier_mse),
            raw_mse: weighted(|s| s.raw_mse),
            five_point_mse_unweighted: unweighted(|s| s.five_point_mse),
            fourier_mse_unweighted: unweighted(|s| s.fourier_mse),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GestureReport {
    pub per_category: BTreeMap<GestureCategory, ShapeScores>,
    /// Over all intervals, plain included.
    pub weighted: ShapeScores,
    pub distribution_reference: BTreeMap<GestureCategory, f64>,
    pub distribution_estimate: BTreeMap<GestureCategory, f64>,
    pub frame_counts_reference: BTreeMap<GestureCategory, u64>,
    pub frame_counts_estimate: BTreeMap<GestureCategory, u64>,
    /// Per-interval detail; only serialized when requested.
    #[serde(skip)]
    pub intervals: Vec<IntervalScore>,
}

impl GestureReport {
    /// Builds the report from interval scores and each curve's frame counts.
    pub fn from_parts(
        intervals: Vec<IntervalScore>,
        frame_counts_reference: BTreeMap<GestureCategory, u64>,
        frame_counts_estimate: BTreeMap<GestureCategory, u64>,
    ) -> Self {
        let per_category = GestureCategory::ALL
            .iter()
            .map(|&c| {
                (
                    c,
                    ShapeScores::from_intervals(intervals.iter().filter(|s| s.category == c)),
                )
            })
            .collect();
        Self {
            per_category,
            weighted: ShapeScores::from_intervals(&intervals),
            distribution_reference: distribution_from_counts(&frame_counts_reference),
            distribution_estimate: distribution_from_counts(&frame_counts_estimate),
            frame_counts_reference,
            frame_counts_estimate,
            intervals,
        }
    }
}

/// Renders interval scores as `category,start,end,five_point_mse,fourier_mse` CSV.
pub fn intervals_csv(intervals: &[IntervalScore]) -> String {
    let mut out = String::from("category,start,end,five_point_mse,fourier_mse\n");
    for s in intervals {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.category, s.start, s.end, s.five_point_mse, s.fourier_mse
        ));
    }
    out
}

pub fn evaluate_gestures(
    pair: &AlignedPair,
    gesture_config: &GestureConfig,
    shape_config: &ShapeConfig,
) -> Result<GestureReport> {
    gesture_config.validate()?;
    shape_config.validate()?;
    let reference = segment_gestures(pair.reference().values(), gesture_config);
    let estimate = segment_gestures(pair.estimate().values(), gesture_config);
    let intervals = reference
        .intervals()
        .into_iter()
        .map(|i| score_interval(pair, i, shape_config))
        .collect::<Result<Vec<_>>>()?;
    Ok(GestureReport::from_parts(
        intervals,
        reference.frame_counts(),
        estimate.frame_counts(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_passes_unchanged() {
        let out = lowpass_reconstruct(&[0.4; 64], 1);
        assert!(out.iter().all(|v| (v - 0.4).abs() < 1e-12));
    }

    #[test]
    fn short_input_is_identity() {
        let v = [0.1, 0.7, 0.2, 0.9, 0.3];
        assert_eq!(lowpass_reconstruct(&v, 11), v.to_vec());
        assert_eq!(lowpass_reconstruct(&v, 3), v.to_vec());
    }

    #[test]
    fn bin_selection() {
        let n = 256;
        let cos = |f: f64| -> Vec<f64> {
            (0..n)
                .map(|t| (2.0 * PI * f * t as f64 / n as f64).cos())
                .collect()
        };
        let low = cos(3.0);
        let out = lowpass_reconstruct(&low, 11);
        assert!(out.iter().zip(&low).all(|(a, b)| (a - b).abs() < 1e-9));
        let out = lowpass_reconstruct(&cos(10.0), 11);
        assert!(out.iter().zip(cos(10.0)).all(|(a, b)| (a - b).abs() < 1e-9));
        let out = lowpass_reconstruct(&cos(11.0), 11);
        assert!(out.iter().all(|a| a.abs() < 1e-9));
        let out = lowpass_reconstruct(&cos(40.0), 11);
        assert!(out.iter().all(|a| a.abs() < 1e-9));
    }

    #[test]
    fn five_point_table() {
        assert_eq!(five_points(&[0.3; 4]).unwrap(), [0.3; 5]);
        assert_eq!(five_points(&[0.0, 1.0]).unwrap(), [0.0, 1.0, 0.5, 0.5, 1.0]);
        let p = five_points(&[0.1, 0.9, 0.5, 0.3]).unwrap();
        let want = [0.1, 0.3, 0.4, 0.45, 0.9];
        assert!(p.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!(five_points(&[]).is_err());
    }

    #[test]
    fn five_point_extremes() {
        assert_eq!(five_point_mse(&[0.0; 9], &[1.0; 9]).unwrap(), 1.0);
        assert_eq!(five_point_mse(&[0.2, 0.4], &[0.2, 0.4]).unwrap(), 0.0);
        assert!(matches!(
            five_point_mse(&[0.2, 0.4], &[0.2]),
            Err(PedalError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn fourier_identical_is_zero() {
        let v: Vec<f64> = (0..100).map(|i| (i as f64 / 17.0).sin().abs()).collect();
        assert_eq!(fourier_mse(&v, &v, 11).unwrap(), 0.0);
    }

    #[test]
    fn interval_weighting() {
        let a = IntervalScore {
            category: GestureCategory::Hill,
            start: 0,
            end: 9,
            five_point_mse: 0.1,
            fourier_mse: 0.2,
            raw_mse: 0.3,
        };
        let b = IntervalScore {
            category: GestureCategory::Plain,
            start: 10,
            end: 39,
            five_point_mse: 0.5,
            fourier_mse: 0.0,
            raw_mse: 0.1,
        };
        let s = ShapeScores::from_intervals([&a, &b]);
        assert_eq!(s.n_frames, 40);
        assert!((s.five_point_mse.unwrap() - (10.0 * 0.1 + 30.0 * 0.5) / 40.0).abs() < 1e-15);
        assert!((s.five_point_mse_unweighted.unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(ShapeScores::from_intervals([]).fourier_mse, None);
    }
}
