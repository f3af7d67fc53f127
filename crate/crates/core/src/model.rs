//! Reference classifiers and training: a logistic head per modality, a
//! one-hidden-layer network on fused features, early stopping with
//! learning-rate halving, subject-grouped cross-validation, seeded random
//! hyperparameter search, and EMA alarm smoothing.
//!
//! Training is plain mini-batch gradient descent on L2-regularized
//! cross-entropy, bit-deterministic under a fixed seed.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::eval;
use crate::fusion::{self, FeatureMatrix, FeatureVector, FusionError, PcaModel, Scaler};
use crate::rng::{child_seed, Rng};
use crate::session::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ClassifierKind {
    #[cfg_attr(feature = "serde", serde(rename = "LOGISTIC"))]
    Logistic,
    #[cfg_attr(feature = "serde", serde(rename = "MLP"))]
    Mlp,
}

/// Weight arrays of a classifier. The MLP hidden layer uses tanh; both
/// kinds end in a sigmoid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ClassifierParams {
    Logistic {
        w: Vec<f64>,
        b: f64,
    },
    Mlp {
        /// `hidden x input`, row per hidden unit.
        w1: Vec<Vec<f64>>,
        b1: Vec<f64>,
        w2: Vec<f64>,
        b2: f64,
    },
}

impl ClassifierParams {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierParams::Logistic { .. } => ClassifierKind::Logistic,
            ClassifierParams::Mlp { .. } => ClassifierKind::Mlp,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            ClassifierParams::Logistic { w, .. } => w.len(),
            ClassifierParams::Mlp { w1, .. } => w1.first().map(Vec::len).unwrap_or(0),
        }
    }

    fn zeros_like(&self) -> ClassifierParams {
        match self {
            ClassifierParams::Logistic { w, .. } => ClassifierParams::Logistic {
                w: alloc::vec![0.0; w.len()],
                b: 0.0,
            },
            ClassifierParams::Mlp { w1, b1, w2, .. } => ClassifierParams::Mlp {
                w1: alloc::vec![alloc::vec![0.0; w1[0].len()]; w1.len()],
                b1: alloc::vec![0.0; b1.len()],
                w2: alloc::vec![0.0; w2.len()],
                b2: 0.0,
            },
        }
    }

    /// Pre-sigmoid logit for input `x`.
    fn logit(&self, x: &[f64]) -> f64 {
        match self {
            ClassifierParams::Logistic { w, b } => dot(w, x) + b,
            ClassifierParams::Mlp { w1, b1, w2, b2 } => {
                let mut z = *b2;
                for ((row, b), wo) in w1.iter().zip(b1).zip(w2) {
                    z += wo * (dot(row, x) + b).tanh();
                }
                z
            }
        }
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    /// Flatten every parameter (weights then biases, layer by layer).
    fn flatten(&self) -> Vec<f64> {
        match self {
            ClassifierParams::Logistic { w, b } => {
                let mut out = w.clone();
                out.push(*b);
                out
            }
            ClassifierParams::Mlp { w1, b1, w2, b2 } => {
                let mut out: Vec<f64> = w1.iter().flatten().copied().collect();
                out.extend_from_slice(b1);
                out.extend_from_slice(w2);
                out.push(*b2);
                out
            }
        }
    }

    fn set_flat(&mut self, idx: usize, value: f64) {
        match self {
            ClassifierParams::Logistic { w, b } => {
                if idx < w.len() {
                    w[idx] = value;
                } else {
                    *b = value;
                }
            }
            ClassifierParams::Mlp { w1, b1, w2, b2 } => {
                let n1 = w1.len() * w1[0].len();
                let d = w1[0].len();
                if idx < n1 {
                    w1[idx / d][idx % d] = value;
                } else if idx < n1 + b1.len() {
                    b1[idx - n1] = value;
                } else if idx < n1 + b1.len() + w2.len() {
                    w2[idx - n1 - b1.len()] = value;
                } else {
                    *b2 = value;
                }
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Numerically stable `ln(1 + e^z)`.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Preprocessing bundle applied in front of a classifier: standardize,
/// optionally pick selected columns, optionally project through PCA.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Preprocess {
    pub scaler: Scaler,
    pub selected: Option<Vec<String>>,
    pub pca: Option<PcaModel>,
}

impl Preprocess {
    pub fn apply(&self, v: &FeatureVector) -> Result<Vec<f64>, FusionError> {
        let scaled = self.scaler.apply_vector(v)?;
        let selected = match &self.selected {
            None => scaled,
            Some(names) => names
                .iter()
                .map(|n| {
                    self.scaler
                        .columns
                        .iter()
                        .position(|c| c == n)
                        .map(|i| scaled[i])
                        .ok_or(FusionError::UnknownColumn(n.clone()))
                })
                .collect::<Result<_, _>>()?,
        };
        match &self.pca {
            None => Ok(selected),
            Some(pca) => fusion::pca_transform(pca, &selected),
        }
    }

    pub fn apply_matrix(&self, m: &FeatureMatrix) -> Result<FeatureMatrix, FusionError> {
        let scaled = self.scaler.apply(m)?;
        let selected = match &self.selected {
            None => scaled,
            Some(names) => scaled.select(names)?,
        };
        match &self.pca {
            None => Ok(selected),
            Some(pca) => {
                let rows = selected
                    .rows
                    .iter()
                    .map(|r| fusion::pca_transform(pca, r))
                    .collect::<Result<Vec<_>, _>>()?;
                let columns = (0..pca.n_components())
                    .map(|i| alloc::format!("pc{i}"))
                    .collect();
                Ok(FeatureMatrix {
                    columns,
                    rows,
                    labels: selected.labels,
                    groups: selected.groups,
                })
            }
        }
    }
}

/// Training metadata kept with a fitted model.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainMeta {
    pub seed: u64,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub final_val_loss: f64,
}

/// A fitted classifier plus its optional preprocessing bundle.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassifierModel {
    pub params: ClassifierParams,
    pub preprocess: Option<Preprocess>,
    pub meta: TrainMeta,
}

impl ClassifierModel {
    pub fn kind(&self) -> ClassifierKind {
        self.params.kind()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub l2: f64,
    pub hidden_units: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            l2: 1e-4,
            hidden_units: 16,
            max_epochs: 200,
            patience: 10,
            batch_size: 32,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(ModelError::BadConfig("learning_rate must be positive".to_string()));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(ModelError::BadConfig("l2 must be non-negative".to_string()));
        }
        if self.hidden_units == 0 || self.max_epochs == 0 || self.batch_size == 0 {
            return Err(ModelError::BadConfig(
                "hidden_units, max_epochs, batch_size must be positive".to_string(),
            ));
        }
        if self.patience == 0 || self.patience >= self.max_epochs {
            return Err(ModelError::BadConfig(
                "patience must satisfy 0 < patience < max_epochs".to_string(),
            ));
        }
        Ok(())
    }
}

/// An alarm raised while smoothing window scores.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlarmEvent {
    pub window_index: usize,
    /// Smoothed score at the trigger.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    SingleClassLabels,
    DimensionMismatch { expected: usize, got: usize },
    Diverged { epoch: usize },
    EmptySeries,
    EmptyBatch,
    BadConfig(String),
    FewerSubjectsThanFolds { subjects: usize, k: usize },
    EmptySearch,
    Fusion(FusionError),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::SingleClassLabels => write!(f, "training labels contain a single class"),
            ModelError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            ModelError::Diverged { epoch } => write!(f, "non-finite loss at epoch {epoch}"),
            ModelError::EmptySeries => write!(f, "empty series"),
            ModelError::EmptyBatch => write!(f, "empty batch"),
            ModelError::BadConfig(msg) => write!(f, "bad config: {msg}"),
            ModelError::FewerSubjectsThanFolds { subjects, k } => {
                write!(f, "{subjects} subjects cannot fill {k} folds")
            }
            ModelError::EmptySearch => write!(f, "empty search space or zero budget"),
            ModelError::Fusion(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ModelError {}

impl From<FusionError> for ModelError {
    fn from(e: FusionError) -> Self {
        ModelError::Fusion(e)
    }
}

fn targets(labels: &[State]) -> Vec<f64> {
    labels
        .iter()
        .map(|&l| if l == State::Drowsy { 1.0 } else { 0.0 })
        .collect()
}

/// Mean cross-entropy over the rows plus `l2/2 * ||weights||^2`
/// (biases unregularized).
fn batch_loss(params: &ClassifierParams, rows: &[Vec<f64>], ys: &[f64], l2: f64) -> f64 {
    let mut ce = 0.0;
    for (x, y) in rows.iter().zip(ys) {
        let z = params.logit(x);
        ce += softplus(z) - y * z;
    }
    ce / rows.len() as f64 + 0.5 * l2 * weight_norm_sq(params)
}

fn weight_norm_sq(params: &ClassifierParams) -> f64 {
    match params {
        ClassifierParams::Logistic { w, .. } => dot(w, w),
        ClassifierParams::Mlp { w1, w2, .. } => {
            w1.iter().map(|r| dot(r, r)).sum::<f64>() + dot(w2, w2)
        }
    }
}

/// Analytic gradient of [`batch_loss`], same shape as the parameters.
fn batch_gradient(
    params: &ClassifierParams,
    rows: &[Vec<f64>],
    ys: &[f64],
    l2: f64,
) -> ClassifierParams {
    let mut grad = params.zeros_like();
    let n = rows.len() as f64;
    match (params, &mut grad) {
        (
            ClassifierParams::Logistic { w, b },
            ClassifierParams::Logistic { w: gw, b: gb },
        ) => {
            for (x, y) in rows.iter().zip(ys) {
                let delta = (sigmoid(dot(w, x) + b) - y) / n;
                for (g, xi) in gw.iter_mut().zip(x) {
                    *g += delta * xi;
                }
                *gb += delta;
            }
            for (g, wi) in gw.iter_mut().zip(w) {
                *g += l2 * wi;
            }
        }
        (
            ClassifierParams::Mlp { w1, b1, w2, b2 },
            ClassifierParams::Mlp { w1: gw1, b1: gb1, w2: gw2, b2: gb2 },
        ) => {
            let hidden = w1.len();
            let mut h = alloc::vec![0.0; hidden];
            for (x, y) in rows.iter().zip(ys) {
                for (j, (row, b)) in w1.iter().zip(b1.iter()).enumerate() {
                    h[j] = (dot(row, x) + b).tanh();
                }
                let delta = (sigmoid(dot(w2, &h) + b2) - y) / n;
                for j in 0..hidden {
                    gw2[j] += delta * h[j];
                    let dz1 = delta * w2[j] * (1.0 - h[j] * h[j]);
                    gb1[j] += dz1;
                    for (g, xi) in gw1[j].iter_mut().zip(x) {
                        *g += dz1 * xi;
                    }
                }
                *gb2 += delta;
            }
            for (grow, wrow) in gw1.iter_mut().zip(w1) {
                for (g, w) in grow.iter_mut().zip(wrow) {
                    *g += l2 * w;
                }
            }
            for (g, w) in gw2.iter_mut().zip(w2) {
                *g += l2 * w;
            }
        }
        _ => unreachable!("gradient shape always matches parameters"),
    }
    grad
}

fn apply_step(params: &mut ClassifierParams, grad: &ClassifierParams, lr: f64) {
    match (params, grad) {
        (
            ClassifierParams::Logistic { w, b },
            ClassifierParams::Logistic { w: gw, b: gb },
        ) => {
            for (p, g) in w.iter_mut().zip(gw) {
                *p -= lr * g;
            }
            *b -= lr * gb;
        }
        (
            ClassifierParams::Mlp { w1, b1, w2, b2 },
            ClassifierParams::Mlp { w1: gw1, b1: gb1, w2: gw2, b2: gb2 },
        ) => {
            for (prow, grow) in w1.iter_mut().zip(gw1) {
                for (p, g) in prow.iter_mut().zip(grow) {
                    *p -= lr * g;
                }
            }
            for (p, g) in b1.iter_mut().zip(gb1) {
                *p -= lr * g;
            }
            for (p, g) in w2.iter_mut().zip(gw2) {
                *p -= lr * g;
            }
            *b2 -= lr * gb2;
        }
        _ => unreachable!(),
    }
}

/// Glorot-style uniform init, `U(-r, r)` with `r = sqrt(6/(fan_in+fan_out))`.
fn init_params(kind: ClassifierKind, dim: usize, hidden: usize, rng: &mut Rng) -> ClassifierParams {
    match kind {
        ClassifierKind::Logistic => {
            let r = (6.0 / (dim + 1) as f64).sqrt();
            ClassifierParams::Logistic {
                w: (0..dim).map(|_| rng.range_f64(-r, r)).collect(),
                b: 0.0,
            }
        }
        ClassifierKind::Mlp => {
            let r1 = (6.0 / (dim + hidden) as f64).sqrt();
            let r2 = (6.0 / (hidden + 1) as f64).sqrt();
            ClassifierParams::Mlp {
                w1: (0..hidden)
                    .map(|_| (0..dim).map(|_| rng.range_f64(-r1, r1)).collect())
                    .collect(),
                b1: alloc::vec![0.0; hidden],
                w2: (0..hidden).map(|_| rng.range_f64(-r2, r2)).collect(),
                b2: 0.0,
            }
        }
    }
}

/// Train by mini-batch gradient descent on L2-regularized cross-entropy.
///
/// The learning rate halves after `patience/2` epochs without validation
/// improvement; training stops after `patience` such epochs and returns
/// the best-validation snapshot. Bit-deterministic under a fixed seed
/// (init draws from sub-stream 0 of `cfg.seed`, epoch shuffles from
/// sub-stream 1).
pub fn train_classifier(
    kind: ClassifierKind,
    train: &FeatureMatrix,
    val: &FeatureMatrix,
    cfg: &TrainConfig,
) -> Result<ClassifierModel, ModelError> {
    cfg.validate()?;
    if train.n_rows() == 0 || val.n_rows() == 0 {
        return Err(ModelError::EmptyBatch);
    }
    if train.n_cols() != val.n_cols() {
        return Err(ModelError::DimensionMismatch { expected: train.n_cols(), got: val.n_cols() });
    }
    let drowsy = train.labels.iter().filter(|&&l| l == State::Drowsy).count();
    if drowsy == 0 || drowsy == train.n_rows() {
        return Err(ModelError::SingleClassLabels);
    }

    let dim = train.n_cols();
    let mut init_rng = Rng::for_stream(cfg.seed, 0);
    let mut shuffle_rng = Rng::for_stream(cfg.seed, 1);
    let mut params = init_params(kind, dim, cfg.hidden_units, &mut init_rng);

    let y_train = targets(&train.labels);
    let y_val = targets(&val.labels);

    let val_loss = |p: &ClassifierParams| batch_loss(p, &val.rows, &y_val, 0.0);

    let mut best = params.clone();
    let mut best_loss = val_loss(&params);
    let mut best_epoch = 0usize;
    let mut stall = 0usize;
    let mut lr_stall = 0usize;
    let mut lr = cfg.learning_rate;
    let half_patience = (cfg.patience / 2).max(1);
    let mut epochs_run = 0usize;

    let mut order: Vec<usize> = (0..train.n_rows()).collect();
    for epoch in 1..=cfg.max_epochs {
        epochs_run = epoch;
        shuffle_rng.shuffle(&mut order);
        for chunk in order.chunks(cfg.batch_size) {
            let rows: Vec<Vec<f64>> = chunk.iter().map(|&i| train.rows[i].clone()).collect();
            let ys: Vec<f64> = chunk.iter().map(|&i| y_train[i]).collect();
            let grad = batch_gradient(&params, &rows, &ys, cfg.l2);
            apply_step(&mut params, &grad, lr);
        }
        let loss = val_loss(&params);
        if !loss.is_finite() {
            return Err(ModelError::Diverged { epoch });
        }
        if loss < best_loss {
            best_loss = loss;
            best = params.clone();
            best_epoch = epoch;
            stall = 0;
            lr_stall = 0;
        } else {
            stall += 1;
            lr_stall += 1;
            if lr_stall >= half_patience {
                lr *= 0.5;
                lr_stall = 0;
            }
            if stall >= cfg.patience {
                break;
            }
        }
    }

    Ok(ClassifierModel {
        params: best,
        preprocess: None,
        meta: TrainMeta {
            seed: cfg.seed,
            epochs_run,
            best_epoch,
            final_val_loss: best_loss,
        },
    })
}

/// Sigmoid score in `(0, 1)` for a named feature vector, applying the
/// model's preprocessing bundle when present.
pub fn predict_score(model: &ClassifierModel, v: &FeatureVector) -> Result<f64, ModelError> {
    let x = match &model.preprocess {
        Some(pre) => pre.apply(v)?,
        None => v.values.clone(),
    };
    if x.len() != model.params.input_dim() {
        return Err(ModelError::DimensionMismatch {
            expected: model.params.input_dim(),
            got: x.len(),
        });
    }
    Ok(model.params.forward(&x))
}

/// Compare the analytic gradient with central finite differences over
/// every parameter; returns the maximum relative error.
pub fn gradient_check(
    model: &ClassifierModel,
    rows: &[Vec<f64>],
    labels: &[State],
    l2: f64,
    eps: f64,
) -> Result<f64, ModelError> {
    if rows.is_empty() {
        return Err(ModelError::EmptyBatch);
    }
    if !(1e-7..=1e-3).contains(&eps) {
        return Err(ModelError::BadConfig("eps must be in [1e-7, 1e-3]".to_string()));
    }
    let ys = targets(labels);
    let analytic = batch_gradient(&model.params, rows, &ys, l2).flatten();
    let base = model.params.flatten();

    let mut max_rel = 0.0f64;
    for (idx, &value) in base.iter().enumerate() {
        let mut plus = model.params.clone();
        plus.set_flat(idx, value + eps);
        let mut minus = model.params.clone();
        minus.set_flat(idx, value - eps);
        let numeric =
            (batch_loss(&plus, rows, &ys, l2) - batch_loss(&minus, rows, &ys, l2)) / (2.0 * eps);
        let denom = (analytic[idx].abs() + numeric.abs()).max(1e-8);
        max_rel = max_rel.max((analytic[idx] - numeric).abs() / denom);
    }
    Ok(max_rel)
}

/// Metrics of one cross-validation fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldMetrics {
    pub accuracy: f64,
    pub f1: Option<f64>,
    pub n_val: usize,
    pub subjects: Vec<String>,
}

/// Per-fold metrics plus their mean/std aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub folds: Vec<FoldMetrics>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    /// Mean over folds where F1 was defined; `None` if it never was.
    pub mean_f1: Option<f64>,
    pub std_f1: Option<f64>,
}

/// k-fold cross-validation grouped by subject: no subject's windows
/// straddle folds. Subjects are shuffled by `fold_seed` and chunked into
/// k near-equal folds; each fold standardizes on its own training rows.
pub fn cross_validate(
    data: &FeatureMatrix,
    k: usize,
    kind: ClassifierKind,
    cfg: &TrainConfig,
    fold_seed: u64,
) -> Result<CvReport, ModelError> {
    if k < 2 {
        return Err(ModelError::BadConfig("k must be >= 2".to_string()));
    }
    let mut subjects: Vec<String> = Vec::new();
    for g in &data.groups {
        if !subjects.contains(g) {
            subjects.push(g.clone());
        }
    }
    subjects.sort();
    if subjects.len() < k {
        return Err(ModelError::FewerSubjectsThanFolds { subjects: subjects.len(), k });
    }
    let mut rng = Rng::for_stream(fold_seed, 2);
    rng.shuffle(&mut subjects);

    // chunk into k folds, the first (n mod k) folds one subject larger
    let base = subjects.len() / k;
    let extra = subjects.len() % k;
    let mut folds_subjects: Vec<Vec<String>> = Vec::with_capacity(k);
    let mut cursor = 0usize;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds_subjects.push(subjects[cursor..cursor + size].to_vec());
        cursor += size;
    }

    let mut folds = Vec::with_capacity(k);
    for fold_subjects in &folds_subjects {
        let val_mask: Vec<bool> = data
            .groups
            .iter()
            .map(|g| fold_subjects.contains(g))
            .collect();
        let (train_m, val_m) = partition_rows(data, &val_mask);
        let scaler = Scaler::fit(&train_m)?;
        let train_s = scaler.apply(&train_m)?;
        let val_s = scaler.apply(&val_m)?;
        let model = train_classifier(kind, &train_s, &val_s, cfg)?;
        let predictions: Vec<State> = val_s
            .rows
            .iter()
            .map(|r| {
                if model.params.forward(r) > 0.5 {
                    State::Drowsy
                } else {
                    State::Alert
                }
            })
            .collect();
        let cm = eval::confusion(&predictions, &val_s.labels)
            .map_err(|_| ModelError::EmptyBatch)?;
        let report = eval::classification_metrics(&cm).map_err(|_| ModelError::EmptyBatch)?;
        folds.push(FoldMetrics {
            accuracy: report.accuracy,
            f1: report.f1,
            n_val: val_s.n_rows(),
            subjects: fold_subjects.clone(),
        });
    }

    let accs: Vec<f64> = folds.iter().map(|f| f.accuracy).collect();
    let (mean_accuracy, std_accuracy) = mean_std(&accs);
    let f1s: Vec<f64> = folds.iter().filter_map(|f| f.f1).collect();
    let (mean_f1, std_f1) = if f1s.is_empty() {
        (None, None)
    } else {
        let (m, s) = mean_std(&f1s);
        (Some(m), Some(s))
    };
    Ok(CvReport { folds, mean_accuracy, std_accuracy, mean_f1, std_f1 })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn partition_rows(data: &FeatureMatrix, val_mask: &[bool]) -> (FeatureMatrix, FeatureMatrix) {
    let mut train = FeatureMatrix {
        columns: data.columns.clone(),
        ..Default::default()
    };
    let mut val = FeatureMatrix {
        columns: data.columns.clone(),
        ..Default::default()
    };
    for (i, row) in data.rows.iter().enumerate() {
        let dst = if val_mask[i] { &mut val } else { &mut train };
        dst.rows.push(row.clone());
        dst.labels.push(data.labels[i]);
        dst.groups.push(data.groups[i].clone());
    }
    (train, val)
}

/// Hyperparameter ranges for [`random_search`]. Learning rate and L2 are
/// sampled log-uniform, hidden units uniform (inclusive), batch size
/// uniformly from the listed choices.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub learning_rate: (f64, f64),
    pub l2: (f64, f64),
    pub hidden_units: (usize, usize),
    pub batch_sizes: Vec<usize>,
    pub max_epochs: usize,
    pub patience: usize,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            learning_rate: (1e-3, 0.3),
            l2: (1e-6, 1e-2),
            hidden_units: (4, 32),
            batch_sizes: alloc::vec![16, 32, 64],
            max_epochs: 200,
            patience: 10,
        }
    }
}

/// One evaluated trial in the search ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub index: usize,
    pub config: TrainConfig,
    pub mean_f1: Option<f64>,
    pub mean_accuracy: f64,
}

/// Seeded uniform random search: samples `budget` configurations,
/// scores each by `cross_validate` mean F1, and returns the best config
/// (earlier trial wins ties) with the full trial ledger.
///
/// Trial `t` draws its parameters from sub-stream `10_000 + t` of `seed`
/// (order: learning rate, l2, hidden units, batch choice) and trains with
/// seed `child_seed(seed, t)`; every trial shares the fold assignment
/// derived from `seed`.
pub fn random_search(
    space: &SearchSpace,
    budget: usize,
    data: &FeatureMatrix,
    kind: ClassifierKind,
    k: usize,
    seed: u64,
) -> Result<(TrainConfig, Vec<Trial>), ModelError> {
    if budget == 0 || space.batch_sizes.is_empty() {
        return Err(ModelError::EmptySearch);
    }
    let mut ledger = Vec::with_capacity(budget);
    let mut best_idx = 0usize;
    for t in 0..budget {
        let mut rng = Rng::for_stream(seed, 10_000 + t as u64);
        let cfg = TrainConfig {
            learning_rate: rng.log_range_f64(space.learning_rate.0, space.learning_rate.1),
            l2: rng.log_range_f64(space.l2.0, space.l2.1),
            hidden_units: space.hidden_units.0
                + rng.range_usize(space.hidden_units.1 - space.hidden_units.0 + 1),
            max_epochs: space.max_epochs,
            patience: space.patience,
            batch_size: space.batch_sizes[rng.range_usize(space.batch_sizes.len())],
            seed: child_seed(seed, t as u64),
        };
        let report = cross_validate(data, k, kind, &cfg, seed)?;
        ledger.push(Trial {
            index: t,
            config: cfg,
            mean_f1: report.mean_f1,
            mean_accuracy: report.mean_accuracy,
        });
        if better_trial(&ledger[t], &ledger[best_idx]) {
            best_idx = t;
        }
    }
    Ok((ledger[best_idx].config.clone(), ledger))
}

fn better_trial(candidate: &Trial, incumbent: &Trial) -> bool {
    let c = candidate.mean_f1.unwrap_or(f64::NEG_INFINITY);
    let i = incumbent.mean_f1.unwrap_or(f64::NEG_INFINITY);
    c > i
}

/// EMA-smooth a score series and raise alarms.
///
/// `EMA_0 = score_0`, `EMA_t = alpha*score_t + (1-alpha)*EMA_{t-1}`. An
/// alarm fires at the index where the EMA has exceeded `threshold` for
/// the `consecutive`-th window in a row, then re-arms once the EMA drops
/// back to or below the threshold.
pub fn smooth_and_alarm(
    scores: &[f64],
    alpha: f64,
    threshold: f64,
    consecutive: usize,
) -> Result<Vec<AlarmEvent>, ModelError> {
    if scores.is_empty() {
        return Err(ModelError::EmptySeries);
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(ModelError::BadConfig("alpha must be in (0, 1]".to_string()));
    }
    if consecutive == 0 {
        return Err(ModelError::BadConfig("consecutive must be >= 1".to_string()));
    }
    let mut alarms = Vec::new();
    let mut ema = scores[0];
    let mut run = 0usize;
    let mut armed = true;
    for (i, &s) in scores.iter().enumerate() {
        if i > 0 {
            ema = alpha * s + (1.0 - alpha) * ema;
        }
        if ema > threshold {
            run += 1;
            if armed && run >= consecutive {
                alarms.push(AlarmEvent { window_index: i, score: ema });
                armed = false;
            }
        } else {
            run = 0;
            armed = true;
        }
    }
    Ok(alarms)
}

/// Smoothed score series (the EMA itself), for stream output.
pub fn ema_series(scores: &[f64], alpha: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(scores.len());
    let mut ema = match scores.first() {
        Some(&s) => s,
        None => return out,
    };
    for (i, &s) in scores.iter().enumerate() {
        if i > 0 {
            ema = alpha * s + (1.0 - alpha) * ema;
        }
        out.push(ema);
    }
    out
}

/// Logistic trainer used by RFE: fixed-budget full-batch gradient
/// descent, returning the per-column weights.
#[derive(Debug, Clone)]
pub struct LogisticRfeTrainer {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
}

impl Default for LogisticRfeTrainer {
    fn default() -> Self {
        Self { epochs: 200, learning_rate: 0.5, l2: 1e-4, seed: 0 }
    }
}

impl fusion::LinearTrainer for LogisticRfeTrainer {
    fn weights(&self, m: &FeatureMatrix) -> Result<Vec<f64>, FusionError> {
        let mut rng = Rng::for_stream(self.seed, 0);
        let mut params = init_params(ClassifierKind::Logistic, m.n_cols(), 1, &mut rng);
        let ys = targets(&m.labels);
        for _ in 0..self.epochs {
            let grad = batch_gradient(&params, &m.rows, &ys, self.l2);
            apply_step(&mut params, &grad, self.learning_rate);
        }
        match params {
            ClassifierParams::Logistic { w, .. } => Ok(w),
            ClassifierParams::Mlp { .. } => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Two Gaussian blobs, linearly separable with a margin.
    fn blobs(n_per_class: usize, seed: u64) -> FeatureMatrix {
        let mut rng = Rng::new(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut groups = Vec::new();
        for i in 0..n_per_class * 2 {
            let drowsy = i % 2 == 1;
            let center = if drowsy { 2.0 } else { -2.0 };
            rows.push(vec![
                center + 0.4 * rng.next_gaussian(),
                -center + 0.4 * rng.next_gaussian(),
            ]);
            labels.push(if drowsy { State::Drowsy } else { State::Alert });
            groups.push(alloc::format!("subj-{}", i % 10));
        }
        FeatureMatrix {
            columns: vec!["x".to_string(), "y".to_string()],
            rows,
            labels,
            groups,
        }
    }

    #[test]
    fn logistic_separates_blobs() {
        let train = blobs(100, 1);
        let val = blobs(30, 2);
        let cfg = TrainConfig::default();
        let model = train_classifier(ClassifierKind::Logistic, &train, &val, &cfg).unwrap();
        let correct = train
            .rows
            .iter()
            .zip(&train.labels)
            .filter(|(r, &l)| (model.params.forward(r) > 0.5) == (l == State::Drowsy))
            .count();
        assert!(correct as f64 / train.n_rows() as f64 >= 0.99);
    }

    #[test]
    fn mlp_separates_blobs() {
        let train = blobs(100, 3);
        let val = blobs(30, 4);
        let cfg = TrainConfig { hidden_units: 8, ..TrainConfig::default() };
        let model = train_classifier(ClassifierKind::Mlp, &train, &val, &cfg).unwrap();
        let correct = train
            .rows
            .iter()
            .zip(&train.labels)
            .filter(|(r, &l)| (model.params.forward(r) > 0.5) == (l == State::Drowsy))
            .count();
        assert!(correct as f64 / train.n_rows() as f64 >= 0.99);
    }

    #[test]
    fn single_class_labels_error() {
        let mut train = blobs(10, 1);
        for l in &mut train.labels {
            *l = State::Alert;
        }
        let val = blobs(5, 2);
        let err = train_classifier(ClassifierKind::Logistic, &train, &val, &TrainConfig::default());
        assert_eq!(err, Err(ModelError::SingleClassLabels));
    }

    #[test]
    fn same_seed_same_weights() {
        let train = blobs(50, 5);
        let val = blobs(20, 6);
        let cfg = TrainConfig::default();
        let a = train_classifier(ClassifierKind::Mlp, &train, &val, &cfg).unwrap();
        let b = train_classifier(ClassifierKind::Mlp, &train, &val, &cfg).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.meta.final_val_loss.to_bits(), b.meta.final_val_loss.to_bits());
    }

    #[test]
    fn zero_weights_score_half() {
        let model = ClassifierModel {
            params: ClassifierParams::Logistic { w: vec![0.0, 0.0], b: 0.0 },
            preprocess: None,
            meta: TrainMeta { seed: 0, epochs_run: 0, best_epoch: 0, final_val_loss: 0.0 },
        };
        let v = FeatureVector {
            columns: vec!["a".to_string(), "b".to_string()],
            values: vec![3.0, -1.0],
        };
        assert_eq!(predict_score(&model, &v).unwrap(), 0.5);
    }

    #[test]
    fn score_monotone_along_weight_direction() {
        let params = ClassifierParams::Logistic { w: vec![1.0, 2.0], b: 0.1 };
        let mut prev = 0.0;
        for k in 0..20 {
            let t = k as f64 * 0.3;
            let s = params.forward(&[t, 2.0 * t]);
            assert!(s > prev);
            prev = s;
        }
    }

    #[test]
    fn forward_matches_hand_recomputation() {
        let params = ClassifierParams::Mlp {
            w1: vec![vec![0.3, -0.2], vec![-0.5, 0.8]],
            b1: vec![0.1, -0.1],
            w2: vec![0.7, -0.4],
            b2: 0.05,
        };
        let x = [0.9, -1.3];
        let h0 = (0.3 * 0.9 + -0.2 * -1.3 + 0.1).tanh();
        let h1 = (-0.5 * 0.9 + 0.8 * -1.3 + -0.1).tanh();
        let z = 0.7 * h0 + -0.4 * h1 + 0.05;
        let expected = 1.0 / (1.0 + (-z).exp());
        assert!((params.forward(&x) - expected).abs() < 1e-12);
    }

    #[test]
    fn gradient_check_logistic_tight() {
        let data = blobs(16, 7);
        let model = ClassifierModel {
            params: init_params(ClassifierKind::Logistic, 2, 1, &mut Rng::new(11)),
            preprocess: None,
            meta: TrainMeta { seed: 11, epochs_run: 0, best_epoch: 0, final_val_loss: 0.0 },
        };
        let err = gradient_check(&model, &data.rows, &data.labels, 1e-4, 1e-5).unwrap();
        assert!(err < 1e-6, "relative error {err}");
    }

    #[test]
    fn gradient_check_mlp() {
        let data = blobs(16, 8);
        let model = ClassifierModel {
            params: init_params(ClassifierKind::Mlp, 2, 16, &mut Rng::new(12)),
            preprocess: None,
            meta: TrainMeta { seed: 12, epochs_run: 0, best_epoch: 0, final_val_loss: 0.0 },
        };
        let err = gradient_check(&model, &data.rows, &data.labels, 1e-4, 1e-5).unwrap();
        assert!(err < 1e-4, "relative error {err}");
    }

    #[test]
    fn gradient_zero_input_zero_first_layer() {
        let params = init_params(ClassifierKind::Mlp, 3, 4, &mut Rng::new(13));
        let rows = vec![vec![0.0, 0.0, 0.0]; 4];
        let labels = vec![1.0, 0.0, 1.0, 0.0];
        let grad = batch_gradient(&params, &rows, &labels, 0.0);
        match grad {
            ClassifierParams::Mlp { w1, .. } => {
                assert!(w1.iter().flatten().all(|&g| g == 0.0));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn cross_validate_partitions_subjects() {
        let data = blobs(100, 9);
        let cfg = TrainConfig { max_epochs: 30, patience: 5, ..TrainConfig::default() };
        let report = cross_validate(&data, 5, ClassifierKind::Logistic, &cfg, 42).unwrap();
        assert_eq!(report.folds.len(), 5);
        let mut seen: Vec<&String> = Vec::new();
        for fold in &report.folds {
            assert_eq!(fold.subjects.len(), 2, "10 subjects over 5 folds");
            for s in &fold.subjects {
                assert!(!seen.contains(&s), "subject {s} in two folds");
                seen.push(s);
            }
        }
        assert_eq!(seen.len(), 10);
        let total: usize = report.folds.iter().map(|f| f.n_val).sum();
        assert_eq!(total, data.n_rows());
    }

    #[test]
    fn cross_validate_more_folds_than_subjects_errors() {
        let data = blobs(10, 9);
        let cfg = TrainConfig::default();
        let err = cross_validate(&data, 11, ClassifierKind::Logistic, &cfg, 42);
        assert!(matches!(err, Err(ModelError::FewerSubjectsThanFolds { subjects: 10, k: 11 })));
    }

    #[test]
    fn random_search_budget_one_and_determinism() {
        let data = blobs(40, 10);
        let space = SearchSpace { max_epochs: 20, patience: 4, ..SearchSpace::default() };
        let (best, ledger) =
            random_search(&space, 1, &data, ClassifierKind::Logistic, 3, 7).unwrap();
        assert_eq!(ledger.len(), 1);
        assert_eq!(best, ledger[0].config);
        let (_, ledger2) = random_search(&space, 1, &data, ClassifierKind::Logistic, 3, 7).unwrap();
        assert_eq!(ledger, ledger2);
    }

    #[test]
    fn alarm_fires_on_third_consecutive() {
        let scores = vec![0.9; 10];
        let alarms = smooth_and_alarm(&scores, 1.0, 0.5, 3).unwrap();
        assert_eq!(alarms.len(), 1);
        assert_eq!(alarms[0].window_index, 2);
    }

    #[test]
    fn no_alarm_below_threshold() {
        let scores = vec![0.2; 10];
        assert!(smooth_and_alarm(&scores, 0.5, 0.5, 2).unwrap().is_empty());
    }

    #[test]
    fn alarm_rearms_after_drop() {
        let scores = vec![0.9, 0.9, 0.1, 0.9, 0.9];
        let alarms = smooth_and_alarm(&scores, 1.0, 0.5, 2).unwrap();
        assert_eq!(alarms.len(), 2);
        assert_eq!(alarms[0].window_index, 1);
        assert_eq!(alarms[1].window_index, 4);
    }

    #[test]
    fn ema_alpha_one_is_identity() {
        let scores = vec![0.1, 0.9, 0.4];
        assert_eq!(ema_series(&scores, 1.0), scores);
    }

    #[test]
    fn empty_scores_error() {
        assert_eq!(smooth_and_alarm(&[], 0.5, 0.5, 1), Err(ModelError::EmptySeries));
    }
}
