//! Confusion accounting and the accuracy / precision / recall / F1 family.
//!
//! Degenerate ratios follow the 0/0 := 0 convention: a class that is never
//! predicted and never occurs contributes precision = recall = F1 = 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::Real;

/// One-vs-rest counts for a single class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

/// Validates that labels are contiguous `0..K` with every class populated,
/// returning the per-class sample counts.
pub fn contiguous_class_counts(labels: &[usize]) -> Result<Vec<usize>> {
    let max = match labels.iter().max() {
        Some(m) => *m,
        None => return Err(Error::Label("no labels given".into())),
    };
    let mut counts = vec![0usize; max + 1];
    for &l in labels {
        counts[l] += 1;
    }
    if let Some(missing) = counts.iter().position(|&c| c == 0) {
        return Err(Error::Label(format!(
            "class {missing} has no samples; labels must be contiguous from 0"
        )));
    }
    Ok(counts)
}

fn check_pair(truth: &[usize], predicted: &[usize], num_classes: usize) -> Result<()> {
    if truth.len() != predicted.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} truth labels vs {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::DimensionMismatch("empty label vectors".into()));
    }
    if let Some(bad) = truth.iter().chain(predicted).find(|l| **l >= num_classes) {
        return Err(Error::Label(format!(
            "label {bad} outside 0..{num_classes}"
        )));
    }
    Ok(())
}

/// One-vs-rest TP/FP/FN/TN per class.
pub fn confusion_counts(
    truth: &[usize],
    predicted: &[usize],
    num_classes: usize,
) -> Result<Vec<ClassCounts>> {
    check_pair(truth, predicted, num_classes)?;
    let total = truth.len() as u64;
    let mut counts = vec![
        ClassCounts {
            tp: 0,
            fp: 0,
            fn_: 0,
            tn: 0
        };
        num_classes
    ];
    for (&t, &p) in truth.iter().zip(predicted) {
        if t == p {
            counts[t].tp += 1;
        } else {
            counts[p].fp += 1;
            counts[t].fn_ += 1;
        }
    }
    for c in counts.iter_mut() {
        c.tn = total - c.tp - c.fp - c.fn_;
    }
    Ok(counts)
}

/// K×K matrix indexed `[truth][predicted]`.
pub fn confusion_matrix(
    truth: &[usize],
    predicted: &[usize],
    num_classes: usize,
) -> Result<Vec<Vec<u64>>> {
    check_pair(truth, predicted, num_classes)?;
    let mut matrix = vec![vec![0u64; num_classes]; num_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        matrix[t][p] += 1;
    }
    Ok(matrix)
}

/// Fraction of positions where prediction equals truth.
pub fn accuracy<F: Real>(truth: &[usize], predicted: &[usize]) -> Result<F> {
    if truth.len() != predicted.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} truth labels vs {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::DimensionMismatch("empty label vectors".into()));
    }
    let correct = truth.iter().zip(predicted).filter(|(t, p)| t == p).count();
    Ok(F::from_usize(correct).unwrap() / F::from_usize(truth.len()).unwrap())
}

/// (precision, recall, F1) for one class's counts, with 0/0 := 0 throughout.
pub fn precision_recall_f1<F: Real>(counts: &ClassCounts) -> (F, F, F) {
    let ratio = |num: u64, den: u64| {
        if den == 0 {
            F::zero()
        } else {
            F::from_u64(num).unwrap() / F::from_u64(den).unwrap()
        }
    };
    let precision = ratio(counts.tp, counts.tp + counts.fp);
    let recall = ratio(counts.tp, counts.tp + counts.fn_);
    let two = F::from_f64(2.0).unwrap();
    let f1 = if precision + recall == F::zero() {
        F::zero()
    } else {
        two * precision * recall / (precision + recall)
    };
    (precision, recall, f1)
}

/// Unweighted mean of the per-class F1 scores.
pub fn macro_f1<F: Real>(truth: &[usize], predicted: &[usize], num_classes: usize) -> Result<F> {
    let counts = confusion_counts(truth, predicted, num_classes)?;
    let sum = counts
        .iter()
        .fold(F::zero(), |acc, c| acc + precision_recall_f1::<F>(c).2);
    Ok(sum / F::from_usize(num_classes).unwrap())
}

/// Per-class metric triple, serialization-friendly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Full evaluation report for one prediction vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub per_class: Vec<PerClassMetrics>,
    pub macro_f1: f64,
}

impl MetricsReport {
    pub fn compute(truth: &[usize], predicted: &[usize], num_classes: usize) -> Result<Self> {
        let counts = confusion_counts(truth, predicted, num_classes)?;
        let per_class: Vec<PerClassMetrics> = counts
            .iter()
            .map(|c| {
                let (precision, recall, f1) = precision_recall_f1::<f64>(c);
                PerClassMetrics {
                    precision,
                    recall,
                    f1,
                }
            })
            .collect();
        let macro_f1 = per_class.iter().map(|c| c.f1).sum::<f64>() / num_classes as f64;
        Ok(MetricsReport {
            accuracy: accuracy(truth, predicted)?,
            per_class,
            macro_f1,
        })
    }
}
