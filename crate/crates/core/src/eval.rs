//! Classification metrics, ROC/AUC, subject-grouped dataset splitting,
//! and latency statistics. DROWSY is the positive class throughout.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::rng::Rng;
use crate::session::{Session, State};

/// Binary confusion counts with DROWSY positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[cfg_attr(feature = "serde", serde(rename = "fn"))]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Derived metrics. Ratios with zero denominators are reported absent
/// rather than coerced to 0.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub auc: Option<f64>,
    pub confusion: ConfusionMatrix,
}

/// Per-frame latency summary; `mean <= p95 <= max` by construction when
/// built from amortized per-frame samples.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LatencyStats {
    pub mean_ms: f64,
    pub p95_ms: f64,
    pub max_ms: f64,
    pub frames: usize,
}

impl LatencyStats {
    /// Summarize per-frame costs in milliseconds (nearest-rank p95).
    pub fn from_samples_ms(samples: &[f64]) -> Option<LatencyStats> {
        if samples.is_empty() {
            return None;
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        let n = sorted.len();
        let rank = ((0.95 * n as f64).ceil() as usize).clamp(1, n);
        Some(LatencyStats {
            mean_ms: sorted.iter().sum::<f64>() / n as f64,
            p95_ms: sorted[rank - 1],
            max_ms: sorted[n - 1],
            frames: n,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    LengthMismatch { predictions: usize, labels: usize },
    EmptyInput,
    SingleClass,
    BadRatios { sum: f64 },
    NonPositiveRatio,
    TooFewSubjects { subjects: usize },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::LengthMismatch { predictions, labels } => {
                write!(f, "length mismatch: {predictions} predictions vs {labels} labels")
            }
            EvalError::EmptyInput => write!(f, "empty input"),
            EvalError::SingleClass => write!(f, "labels contain a single class"),
            EvalError::BadRatios { sum } => write!(f, "ratios must sum to 1, got {sum}"),
            EvalError::NonPositiveRatio => write!(f, "ratios must be positive"),
            EvalError::TooFewSubjects { subjects } => {
                write!(f, "need at least 3 subjects, got {subjects}")
            }
        }
    }
}

impl core::error::Error for EvalError {}

/// Count the confusion matrix of predictions against labels.
pub fn confusion(predictions: &[State], labels: &[State]) -> Result<ConfusionMatrix, EvalError> {
    if predictions.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            labels: labels.len(),
        });
    }
    if predictions.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &l) in predictions.iter().zip(labels) {
        match (p, l) {
            (State::Drowsy, State::Drowsy) => cm.tp += 1,
            (State::Drowsy, State::Alert) => cm.fp += 1,
            (State::Alert, State::Alert) => cm.tn += 1,
            (State::Alert, State::Drowsy) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

/// Accuracy, precision, recall, and F1 from confusion counts (AUC left
/// absent; fill it from [`roc_auc`] when scores exist).
pub fn classification_metrics(cm: &ConfusionMatrix) -> Result<MetricsReport, EvalError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvalError::EmptyInput);
    }
    let accuracy = (cm.tp + cm.tn) as f64 / total as f64;
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    Ok(MetricsReport { accuracy, precision, recall, f1, auc: None, confusion: *cm })
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// ROC curve and trapezoidal AUC from scores. Equal scores are grouped
/// into one threshold step, so the curve is a monotone staircase from
/// (0,0) to (1,1) in (FPR, TPR).
pub fn roc_auc(scores: &[f64], labels: &[State]) -> Result<(Vec<(f64, f64)>, f64), EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::LengthMismatch { predictions: scores.len(), labels: labels.len() });
    }
    let positives = labels.iter().filter(|&&l| l == State::Drowsy).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(EvalError::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(core::cmp::Ordering::Equal)
    });

    let (np, nn) = (positives as f64, negatives as f64);
    let mut curve = Vec::with_capacity(scores.len() + 1);
    curve.push((0.0, 0.0));
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = 0.0;
    let (mut prev_fpr, mut prev_tpr) = (0.0, 0.0);
    let mut i = 0;
    while i < order.len() {
        // advance through the whole tie group at this score
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] == State::Drowsy {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let fpr = fp as f64 / nn;
        let tpr = tp as f64 / np;
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        curve.push((fpr, tpr));
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    Ok((curve, auc))
}

/// Subject-grouped dataset split. Session indices for train/val/test.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Split sessions into train/val/test by whole subjects.
///
/// Subjects are shuffled by `seed`, then each is assigned to the set
/// whose session-count deficit against its target is largest (ties
/// favouring train, then val). With equal-size subjects the achievable
/// counts are quantized, so targets are met as closely as whole subjects
/// allow.
pub fn split_dataset(
    sessions: &[Session],
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<SplitIndices, EvalError> {
    let (r_train, r_val, r_test) = ratios;
    if r_train <= 0.0 || r_val <= 0.0 || r_test <= 0.0 {
        return Err(EvalError::NonPositiveRatio);
    }
    let sum = r_train + r_val + r_test;
    if (sum - 1.0).abs() > 1e-9 {
        return Err(EvalError::BadRatios { sum });
    }
    let mut subjects: Vec<String> = Vec::new();
    for s in sessions {
        if !subjects.contains(&s.subject_id) {
            subjects.push(s.subject_id.clone());
        }
    }
    subjects.sort();
    if subjects.len() < 3 {
        return Err(EvalError::TooFewSubjects { subjects: subjects.len() });
    }
    let mut rng = Rng::new(seed);
    rng.shuffle(&mut subjects);

    let n = sessions.len() as f64;
    let targets = [r_train * n, r_val * n, r_test * n];
    let mut assigned = [0.0f64; 3];
    let mut subject_set: alloc::collections::BTreeMap<&str, usize> = Default::default();
    for subj in &subjects {
        let count = sessions.iter().filter(|s| &s.subject_id == subj).count() as f64;
        let mut best = 0usize;
        for set in 1..3 {
            if targets[set] - assigned[set] > targets[best] - assigned[best] {
                best = set;
            }
        }
        assigned[best] += count;
        subject_set.insert(subj, best);
    }

    let mut out = SplitIndices::default();
    for (i, s) in sessions.iter().enumerate() {
        match subject_set[s.subject_id.as_str()] {
            0 => out.train.push(i),
            1 => out.val.push(i),
            _ => out.test.push(i),
        }
    }
    Ok(out)
}
