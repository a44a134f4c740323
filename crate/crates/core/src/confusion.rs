//! Confusion matrices and precision / recall / F1.

use serde::{Deserialize, Serialize};

use crate::error::{PedalError, Result};

/// Square count matrix; rows are reference classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    n_classes: usize,
    counts: Vec<Vec<u64>>,
}

/// How per-class scores are combined into one number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Averaging {
    /// Unweighted mean over classes present in the reference or the prediction.
    Macro,
    /// Mean weighted by reference-class support.
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Reference frames of this class.
    pub support: u64,
    /// Predicted frames of this class.
    pub predicted: u64,
}

/// Per-class scores with both averagings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub weighted: Scores,
    #[serde(rename = "macro")]
    pub macro_avg: Scores,
    /// `None` for classes absent from both reference and prediction.
    pub per_class: Vec<Option<ClassScores>>,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Self {
        Self {
            n_classes,
            counts: vec![vec![0; n_classes]; n_classes],
        }
    }

    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let n = counts.len();
        if n == 0 || counts.iter().any(|row| row.len() != n) {
            return Err(PedalError::Parameter(
                "confusion counts must be a non-empty square grid".into(),
            ));
        }
        Ok(Self {
            n_classes: n,
            counts,
        })
    }

    pub fn from_labels(reference: &[usize], predicted: &[usize], n_classes: usize) -> Result<Self> {
        if reference.len() != predicted.len() {
            return Err(PedalError::LengthMismatch {
                reference: reference.len(),
                estimate: predicted.len(),
            });
        }
        let mut m = Self::new(n_classes);
        for (&r, &p) in reference.iter().zip(predicted) {
            if r >= n_classes || p >= n_classes {
                return Err(PedalError::Parameter(format!(
                    "label {} outside 0..{n_classes}",
                    r.max(p)
                )));
            }
            m.counts[r][p] += 1;
        }
        Ok(m)
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Fraction of frames on the diagonal.
    pub fn accuracy(&self) -> f64 {
        let diag: u64 = (0..self.n_classes).map(|i| self.counts[i][i]).sum();
        ratio(diag, self.total())
    }

    /// Element-wise sum; both matrices must have the same class count.
    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.n_classes != self.n_classes {
            return Err(PedalError::Parameter(format!(
                "cannot merge {}-class and {}-class confusion matrices",
                self.n_classes, other.n_classes
            )));
        }
        for (row, other_row) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(other_row) {
                *c += o;
            }
        }
        Ok(())
    }

    fn support(&self, class: usize) -> u64 {
        self.counts[class].iter().sum()
    }

    fn predicted(&self, class: usize) -> u64 {
        self.counts.iter().map(|row| row[class]).sum()
    }

    /// Scores for one class. A zero denominator yields 0 for that score.
    pub fn class_scores(&self, class: usize) -> ClassScores {
        let tp = self.counts[class][class];
        let support = self.support(class);
        let predicted = self.predicted(class);
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        ClassScores {
            precision,
            recall,
            f1: harmonic(precision, recall),
            support,
            predicted,
        }
    }

    pub fn per_class(&self) -> Vec<Option<ClassScores>> {
        (0..self.n_classes)
            .map(|c| {
                let s = self.class_scores(c);
                (s.support + s.predicted > 0).then_some(s)
            })
            .collect()
    }

    pub fn prf(&self, averaging: Averaging) -> Result<Scores> {
        let total = self.total();
        if total == 0 {
            return Err(PedalError::EmptyInput(
                "confusion matrix has no frames".into(),
            ));
        }
        let present: Vec<ClassScores> = self.per_class().into_iter().flatten().collect();
        // Sum weight * score first and divide once, so perfect scores stay exactly 1.
        let (mut p, mut r, mut f) = (0.0, 0.0, 0.0);
        for s in &present {
            let w = match averaging {
                Averaging::Macro => 1.0,
                Averaging::Weighted => s.support as f64,
            };
            p += w * s.precision;
            r += w * s.recall;
            f += w * s.f1;
        }
        let norm = match averaging {
            Averaging::Macro => present.len() as f64,
            Averaging::Weighted => total as f64,
        };
        Ok(Scores {
            precision: p / norm,
            recall: r / norm,
            f1: f / norm,
        })
    }

    pub fn summary(&self) -> Result<Summary> {
        Ok(Summary {
            weighted: self.prf(Averaging::Weighted)?,
            macro_avg: self.prf(Averaging::Macro)?,
            per_class: self.per_class(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn perfect_diagonal() {
        let m = ConfusionMatrix::from_counts(vec![vec![5, 0, 0], vec![0, 3, 0], vec![0, 0, 9]])
            .unwrap();
        for avg in [Averaging::Macro, Averaging::Weighted] {
            let s = m.prf(avg).unwrap();
            assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        }
    }

    #[test]
    fn two_class_hand_arithmetic() {
        let m = ConfusionMatrix::from_counts(vec![vec![8, 2], vec![3, 7]]).unwrap();
        let c0 = m.class_scores(0);
        let c1 = m.class_scores(1);
        assert!(close(c0.precision, 8.0 / 11.0) && close(c0.recall, 0.8));
        assert!(close(c1.precision, 7.0 / 9.0) && close(c1.recall, 0.7));
        let f0 = 2.0 * (8.0 / 11.0) * 0.8 / (8.0 / 11.0 + 0.8);
        let f1 = 2.0 * (7.0 / 9.0) * 0.7 / (7.0 / 9.0 + 0.7);
        let w = m.prf(Averaging::Weighted).unwrap();
        let mac = m.prf(Averaging::Macro).unwrap();
        assert!(close(mac.f1, (f0 + f1) / 2.0));
        assert!(close(w.f1, mac.f1));
    }

    #[test]
    fn absent_class_is_excluded_from_macro() {
        let m = ConfusionMatrix::from_labels(&[0, 0, 0], &[0, 0, 0], 2).unwrap();
        assert_eq!(m.prf(Averaging::Macro).unwrap().f1, 1.0);
        assert_eq!(m.prf(Averaging::Weighted).unwrap().f1, 1.0);
        assert_eq!(m.per_class()[1], None);
    }

    #[test]
    fn class_present_on_one_side_scores_zero() {
        // Reference has class 1 that is never predicted.
        let m = ConfusionMatrix::from_labels(&[0, 1], &[0, 0], 2).unwrap();
        let c1 = m.per_class()[1].unwrap();
        assert_eq!((c1.precision, c1.recall, c1.f1), (0.0, 0.0, 0.0));
        let mac = m.prf(Averaging::Macro).unwrap();
        // Class 0: P = 1/2, R = 1, F1 = 2/3.
        assert!(close(mac.f1, (2.0 / 3.0) / 2.0));
    }

    #[test]
    fn empty_matrix_is_an_error() {
        assert!(matches!(
            ConfusionMatrix::new(2).prf(Averaging::Macro),
            Err(PedalError::EmptyInput(_))
        ));
    }

    #[test]
    fn merge_adds_counts() {
        let mut a = ConfusionMatrix::from_labels(&[0, 1], &[0, 1], 2).unwrap();
        let b = ConfusionMatrix::from_labels(&[1], &[0], 2).unwrap();
        a.merge(&b).unwrap();
        assert_eq!(a.counts(), &[vec![1, 0], vec![1, 1]]);
        assert!(a.merge(&ConfusionMatrix::new(3)).is_err());
    }
}
