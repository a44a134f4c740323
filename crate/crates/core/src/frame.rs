//! Frame-level scores: discretized classification and regression errors.

use serde::{Deserialize, Serialize};

use crate::confusion::{ConfusionMatrix, Summary};
use crate::curve::AlignedPair;
use crate::error::{PedalError, Result};

/// Upper edges of the four quantization bins; the last bin is closed at 1.
pub const FOURCLASS_EDGES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameConfig {
    /// Depth at or above which a frame counts as pedal-on.
    pub binary_threshold: f64,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            binary_threshold: 0.5,
        }
    }
}

impl FrameConfig {
    pub fn validate(&self) -> Result<()> {
        if self.binary_threshold > 0.0 && self.binary_threshold < 1.0 {
            Ok(())
        } else {
            Err(PedalError::InvalidConfig(format!(
                "frame.binary_threshold must be in (0, 1), got {}",
                self.binary_threshold
            )))
        }
    }
}

pub fn binarize(values: &[f64], threshold: f64) -> Vec<usize> {
    values
        .iter()
        .map(|&v| usize::from(v >= threshold))
        .collect()
}

pub fn quantize4(values: &[f64]) -> Vec<usize> {
    values
        .iter()
        .map(|&v| ((v * 4.0).floor() as usize).min(3))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionErrors {
    pub mse: f64,
    pub mae: f64,
}

pub fn regression_errors(pair: &AlignedPair) -> RegressionErrors {
    let (sq, abs) = pair.frames().fold((0.0, 0.0), |(sq, abs), (r, e)| {
        let d = r - e;
        (sq + d * d, abs + d.abs())
    });
    let n = pair.len() as f64;
    RegressionErrors {
        mse: sq / n,
        mae: abs / n,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub n_frames: u64,
    pub binary_threshold: f64,
    pub fourclass_edges: Vec<f64>,
    /// Headline scores use weighted averaging; macro and per-class are included.
    pub binary: Summary,
    pub fourclass: Summary,
    pub binary_confusion: ConfusionMatrix,
    pub fourclass_confusion: ConfusionMatrix,
    pub mse: f64,
    pub mae: f64,
}

pub fn evaluate_frames(pair: &AlignedPair, config: &FrameConfig) -> Result<FrameReport> {
    config.validate()?;
    let t = config.binary_threshold;
    let binary_confusion = ConfusionMatrix::from_labels(
        &binarize(pair.reference().values(), t),
        &binarize(pair.estimate().values(), t),
        2,
    )?;
    let fourclass_confusion = ConfusionMatrix::from_labels(
        &quantize4(pair.reference().values()),
        &quantize4(pair.estimate().values()),
        4,
    )?;
    let errors = regression_errors(pair);
    Ok(FrameReport {
        n_frames: pair.len() as u64,
        binary_threshold: t,
        fourclass_edges: FOURCLASS_EDGES.to_vec(),
        binary: binary_confusion.summary()?,
        fourclass: fourclass_confusion.summary()?,
        binary_confusion,
        fourclass_confusion,
        mse: errors.mse,
        mae: errors.mae,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{align, AlignPolicy, PedalCurve};

    fn pair(r: &[f64], e: &[f64]) -> AlignedPair {
        let r = PedalCurve::new(100.0, r.to_vec(), "r").unwrap();
        let e = PedalCurve::new(100.0, e.to_vec(), "e").unwrap();
        align(&r, &e, AlignPolicy::Strict).unwrap()
    }

    #[test]
    fn binarize_boundary_inclusive() {
        assert_eq!(binarize(&[0.2, 0.5, 0.8], 0.5), vec![0, 1, 1]);
        assert_eq!(binarize(&[0.49999], 0.5), vec![0]);
        assert_eq!(binarize(&[0.0; 4], 0.5), vec![0; 4]);
    }

    #[test]
    fn quantize_bins() {
        assert_eq!(quantize4(&[0.0, 0.25, 0.5, 0.75, 1.0]), vec![0, 1, 2, 3, 3]);
        assert_eq!(quantize4(&[0.24999]), vec![0]);
    }

    #[test]
    fn regression_extremes() {
        let e = regression_errors(&pair(&[0.0; 7], &[1.0; 7]));
        assert_eq!((e.mse, e.mae), (1.0, 1.0));
        let e = regression_errors(&pair(&[0.3; 3], &[0.3; 3]));
        assert_eq!((e.mse, e.mae), (0.0, 0.0));
    }

    #[test]
    fn four_frame_example() {
        let rep = evaluate_frames(
            &pair(&[0.0, 0.0, 1.0, 1.0], &[0.0, 1.0, 1.0, 0.0]),
            &FrameConfig::default(),
        )
        .unwrap();
        assert_eq!(rep.binary.weighted.f1, 0.5);
        assert_eq!(rep.mse, 0.5);
        assert_eq!(rep.mae, 0.5);
        assert_eq!(rep.binary_confusion.counts(), &[vec![1, 1], vec![1, 1]]);
    }

    #[test]
    fn identity_is_perfect() {
        let v: Vec<f64> = (0..50).map(|i| i as f64 / 49.0).collect();
        let rep = evaluate_frames(&pair(&v, &v), &FrameConfig::default()).unwrap();
        assert_eq!(rep.binary.weighted.f1, 1.0);
        assert_eq!(rep.fourclass.weighted.f1, 1.0);
        assert_eq!(rep.fourclass.macro_avg.f1, 1.0);
        assert_eq!((rep.mse, rep.mae), (0.0, 0.0));
    }

    #[test]
    fn inverted_interior_curve_has_zero_accuracy() {
        let v = [0.1, 0.3, 0.7, 0.9, 0.2, 0.6];
        let inv: Vec<f64> = v.iter().map(|x| 1.0 - x).collect();
        let rep = evaluate_frames(&pair(&v, &inv), &FrameConfig::default()).unwrap();
        assert_eq!(rep.binary_confusion.accuracy(), 0.0);
    }

    #[test]
    fn threshold_must_be_interior() {
        assert!(FrameConfig {
            binary_threshold: 1.0
        }
        .validate()
        .is_err());
    }
}
