//! Feature-level fusion (concatenation, scaling, mutual-information
//! ranking, recursive feature elimination, PCA) and decision-level fusion
//! (quality-derived weights over modality scores).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::session::State;
use crate::vision::{VisionFeatures, VISION_FEATURE_NAMES};
use crate::physio::{PhysioFeatures, PHYSIO_FEATURE_NAMES};

/// A named feature vector for one window.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub columns: Vec<String>,
    pub values: Vec<f64>,
}

/// Windows-by-features matrix with per-row label and subject group.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureMatrix {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<State>,
    /// Subject id per row; grouping unit for splits and folds.
    pub groups: Vec<String>,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, idx: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[idx]).collect()
    }

    /// New matrix keeping only the named columns, in the given order.
    pub fn select(&self, names: &[String]) -> Result<FeatureMatrix, FusionError> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.column_index(n).ok_or(FusionError::UnknownColumn(n.clone())))
            .collect::<Result<_, _>>()?;
        Ok(FeatureMatrix {
            columns: names.to_vec(),
            rows: self
                .rows
                .iter()
                .map(|r| idx.iter().map(|&i| r[i]).collect())
                .collect(),
            labels: self.labels.clone(),
            groups: self.groups.clone(),
        })
    }

    pub fn validate(&self) -> Result<(), FusionError> {
        for (i, a) in self.columns.iter().enumerate() {
            if self.columns[i + 1..].contains(a) {
                return Err(FusionError::DuplicateColumn(a.clone()));
            }
        }
        if self.rows.len() != self.labels.len() || self.rows.len() != self.groups.len() {
            return Err(FusionError::ShapeMismatch);
        }
        for r in &self.rows {
            if r.len() != self.columns.len() {
                return Err(FusionError::ShapeMismatch);
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(FusionError::NonFiniteEntry);
            }
        }
        Ok(())
    }
}

/// Per-column standardization learned on training rows. Zero-variance
/// columns are dropped and recorded.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scaler {
    pub columns: Vec<String>,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub dropped: Vec<String>,
}

impl Scaler {
    pub fn fit(m: &FeatureMatrix) -> Result<Scaler, FusionError> {
        if m.n_rows() < 2 {
            return Err(FusionError::TooFewRows { rows: m.n_rows(), needed: 2 });
        }
        let n = m.n_rows() as f64;
        let mut columns = Vec::new();
        let mut mu = Vec::new();
        let mut sigma = Vec::new();
        let mut dropped = Vec::new();
        for (j, name) in m.columns.iter().enumerate() {
            let col = m.column(j);
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
            let sd = var.sqrt();
            if sd > 0.0 {
                columns.push(name.clone());
                mu.push(mean);
                sigma.push(sd);
            } else {
                dropped.push(name.clone());
            }
        }
        if columns.is_empty() {
            return Err(FusionError::AllColumnsZeroVariance);
        }
        Ok(Scaler { columns, mu, sigma, dropped })
    }

    /// Standardize a matrix; input must contain every kept column.
    pub fn apply(&self, m: &FeatureMatrix) -> Result<FeatureMatrix, FusionError> {
        let mut out = m.select(&self.columns)?;
        for row in &mut out.rows {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (*v - self.mu[j]) / self.sigma[j];
            }
        }
        Ok(out)
    }

    /// Standardize one named vector.
    pub fn apply_vector(&self, v: &FeatureVector) -> Result<Vec<f64>, FusionError> {
        self.columns
            .iter()
            .zip(self.mu.iter().zip(&self.sigma))
            .map(|(name, (mu, sigma))| {
                let idx = v
                    .columns
                    .iter()
                    .position(|c| c == name)
                    .ok_or(FusionError::UnknownColumn(name.clone()))?;
                Ok((v.values[idx] - mu) / sigma)
            })
            .collect()
    }
}

/// PCA fitted on centered training rows: orthonormal components sorted by
/// decreasing eigenvalue.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `k x d`, rows are components.
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub explained_variance_ratios: Vec<f64>,
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }
}

/// Decision-fusion weights, normalized so `w_v + w_p = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FusionWeights {
    pub w_v: f64,
    pub w_p: f64,
}

/// A modality score with its signal quality, both in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalityScore {
    pub score: f64,
    pub quality: f64,
}

impl ModalityScore {
    pub fn new(score: f64, quality: f64) -> Result<Self, FusionError> {
        if !((0.0..=1.0).contains(&score) && (0.0..=1.0).contains(&quality)) {
            return Err(FusionError::OutOfRange { score, quality });
        }
        Ok(Self { score, quality })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FusionError {
    MissingModality(&'static str),
    UnknownColumn(String),
    DuplicateColumn(String),
    ShapeMismatch,
    NonFiniteEntry,
    TooFewRows { rows: usize, needed: usize },
    AllColumnsZeroVariance,
    SingleClassLabels,
    BadBins(usize),
    KOutOfRange { k: usize, cols: usize },
    BadTarget(f64),
    DimensionMismatch { expected: usize, got: usize },
    NoUsableModality,
    OutOfRange { score: f64, quality: f64 },
    EigenFailure,
}

impl fmt::Display for FusionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FusionError::MissingModality(which) => write!(f, "missing modality: {which}"),
            FusionError::UnknownColumn(c) => write!(f, "unknown column {c}"),
            FusionError::DuplicateColumn(c) => write!(f, "duplicate column {c}"),
            FusionError::ShapeMismatch => write!(f, "matrix shape mismatch"),
            FusionError::NonFiniteEntry => write!(f, "non-finite matrix entry"),
            FusionError::TooFewRows { rows, needed } => {
                write!(f, "too few rows: {rows}, need {needed}")
            }
            FusionError::AllColumnsZeroVariance => write!(f, "all columns have zero variance"),
            FusionError::SingleClassLabels => write!(f, "labels contain a single class"),
            FusionError::BadBins(b) => write!(f, "bins must be >= 2, got {b}"),
            FusionError::KOutOfRange { k, cols } => {
                write!(f, "k out of range: {k} of {cols} columns")
            }
            FusionError::BadTarget(t) => write!(f, "evr_target must be in (0, 1], got {t}"),
            FusionError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            FusionError::NoUsableModality => write!(f, "no usable modality: both qualities zero"),
            FusionError::OutOfRange { score, quality } => {
                write!(f, "score {score} / quality {quality} outside [0, 1]")
            }
            FusionError::EigenFailure => write!(f, "eigendecomposition failed to converge"),
        }
    }
}

impl core::error::Error for FusionError {}

/// Concatenate the two modality vectors: vision columns first, prefixed
/// `v.`, then physio prefixed `p.`.
pub fn concat_features(
    fv: &VisionFeatures,
    fp: &PhysioFeatures,
) -> Result<FeatureVector, FusionError> {
    let values = fv.values.ok_or(FusionError::MissingModality("vision"))?;
    let mut columns: Vec<String> = VISION_FEATURE_NAMES
        .iter()
        .map(|n| alloc::format!("v.{n}"))
        .collect();
    columns.extend(PHYSIO_FEATURE_NAMES.iter().map(|n| alloc::format!("p.{n}")));
    let mut out = values.to_vec();
    out.extend(fp.to_vec());
    Ok(FeatureVector { columns, values: out })
}

/// Canonical fused column names (`v.*` then `p.*`).
pub fn fused_column_names() -> Vec<String> {
    let mut columns: Vec<String> = VISION_FEATURE_NAMES
        .iter()
        .map(|n| alloc::format!("v.{n}"))
        .collect();
    columns.extend(PHYSIO_FEATURE_NAMES.iter().map(|n| alloc::format!("p.{n}")));
    columns
}

/// Rank features by mutual information (bits) with the binary label,
/// estimated from a joint histogram over equal-frequency bins.
///
/// Ties in MI break by column name so the ordering is deterministic.
pub fn rank_features_mi(
    m: &FeatureMatrix,
    bins: usize,
) -> Result<Vec<(String, f64)>, FusionError> {
    if bins < 2 {
        return Err(FusionError::BadBins(bins));
    }
    let n = m.n_rows();
    if n == 0 {
        return Err(FusionError::TooFewRows { rows: 0, needed: 1 });
    }
    let drowsy = m.labels.iter().filter(|&&l| l == State::Drowsy).count();
    if drowsy == 0 || drowsy == n {
        return Err(FusionError::SingleClassLabels);
    }

    let mut scored: Vec<(String, f64)> = m
        .columns
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let col = m.column(j);
            (name.clone(), mutual_information_bits(&col, &m.labels, bins))
        })
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(scored)
}

/// MI(X; Y) in bits from a `bins x 2` joint histogram. Bin edges are
/// lower-quantile cut points; a value lands in the bin counting edges
/// strictly below it, so tied values share a bin and a constant column
/// has MI exactly 0.
pub fn mutual_information_bits(values: &[f64], labels: &[State], bins: usize) -> f64 {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let mut edges = Vec::with_capacity(bins - 1);
    for k in 1..bins {
        let idx = (k * n).div_ceil(bins).saturating_sub(1);
        edges.push(sorted[idx.min(n - 1)]);
    }

    let mut joint = alloc::vec![[0usize; 2]; bins];
    for (v, l) in values.iter().zip(labels) {
        let bin = edges.iter().filter(|&&e| e < *v).count();
        let y = usize::from(*l == State::Drowsy);
        joint[bin][y] += 1;
    }

    let nf = n as f64;
    let py: [f64; 2] = {
        let d = labels.iter().filter(|&&l| l == State::Drowsy).count() as f64;
        [(nf - d) / nf, d / nf]
    };
    let mut mi = 0.0;
    for cell in &joint {
        let px = (cell[0] + cell[1]) as f64 / nf;
        if px == 0.0 {
            continue;
        }
        for y in 0..2 {
            let pxy = cell[y] as f64 / nf;
            if pxy > 0.0 && py[y] > 0.0 {
                mi += pxy * (pxy / (px * py[y])).log2();
            }
        }
    }
    mi.max(0.0)
}

/// Trains a linear model and reports one weight per column; backs RFE.
pub trait LinearTrainer {
    fn weights(&self, m: &FeatureMatrix) -> Result<Vec<f64>, FusionError>;
}

/// Recursive feature elimination: repeatedly drop the column whose
/// standardized-model weight is smallest in magnitude until `k` remain.
/// Weight ties drop the later column.
pub fn rfe(
    m: &FeatureMatrix,
    k: usize,
    trainer: &dyn LinearTrainer,
) -> Result<Vec<String>, FusionError> {
    if k == 0 || k > m.n_cols() {
        return Err(FusionError::KOutOfRange { k, cols: m.n_cols() });
    }
    let mut current = m.clone();
    while current.n_cols() > k {
        let scaler = Scaler::fit(&current)?;
        let standardized = scaler.apply(&current)?;
        let weights = trainer.weights(&standardized)?;
        if weights.len() != standardized.n_cols() {
            return Err(FusionError::ShapeMismatch);
        }
        // weakest standardized column; ties drop the later one
        let mut weakest = 0usize;
        for (j, w) in weights.iter().enumerate() {
            if w.abs() <= weights[weakest].abs() {
                weakest = j;
            }
        }
        let drop_name = standardized.columns[weakest].clone();
        let keep: Vec<String> = current
            .columns
            .iter()
            .filter(|c| **c != drop_name)
            .cloned()
            .collect();
        current = current.select(&keep)?;
    }
    Ok(current.columns)
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Returns
/// `(eigenvalues, eigenvectors as columns)` unsorted.
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> Result<(Vec<f64>, Vec<Vec<f64>>), FusionError> {
    let d = a.len();
    let mut v = alloc::vec![alloc::vec![0.0; d]; d];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let frob: f64 = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    if frob == 0.0 {
        return Ok((alloc::vec![0.0; d], v));
    }
    let tol = 1e-14 * frob;
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..d {
            for q in p + 1..d {
                off += a[p][q] * a[p][q];
            }
        }
        if off.sqrt() < tol {
            let eigenvalues = (0..d).map(|i| a[i][i]).collect();
            return Ok((eigenvalues, v));
        }
        for p in 0..d {
            for q in p + 1..d {
                if a[p][q].abs() < tol * 1e-3 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..d {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for i in 0..d {
                    let api = a[p][i];
                    let aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
                for row in v.iter_mut() {
                    let vip = row[p];
                    let viq = row[q];
                    row[p] = c * vip - s * viq;
                    row[q] = s * vip + c * viq;
                }
            }
        }
    }
    Err(FusionError::EigenFailure)
}

/// Fit PCA on training rows: eigendecompose the sample covariance of the
/// centered data and keep the smallest component count whose cumulative
/// explained-variance ratio reaches `evr_target`.
///
/// Component signs are fixed by making each component's
/// largest-magnitude entry positive.
pub fn fit_pca(m: &FeatureMatrix, evr_target: f64) -> Result<PcaModel, FusionError> {
    if m.n_rows() < 2 {
        return Err(FusionError::TooFewRows { rows: m.n_rows(), needed: 2 });
    }
    if !(evr_target > 0.0 && evr_target <= 1.0) {
        return Err(FusionError::BadTarget(evr_target));
    }
    let d = m.n_cols();
    let n = m.n_rows() as f64;
    let mean: Vec<f64> = (0..d)
        .map(|j| m.rows.iter().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    let mut cov = alloc::vec![alloc::vec![0.0; d]; d];
    for row in &m.rows {
        for i in 0..d {
            let di = row[i] - mean[i];
            for j in i..d {
                cov[i][j] += di * (row[j] - mean[j]);
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            cov[i][j] /= n - 1.0;
            cov[j][i] = cov[i][j];
        }
    }

    let (eigenvalues, vectors) = jacobi_eigen(cov)?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eigenvalues[b]
            .partial_cmp(&eigenvalues[a])
            .unwrap_or(core::cmp::Ordering::Equal)
    });

    let total: f64 = eigenvalues.iter().map(|&l| l.max(0.0)).sum();
    if total <= 0.0 {
        return Err(FusionError::AllColumnsZeroVariance);
    }

    let mut components = Vec::new();
    let mut kept_eigenvalues = Vec::new();
    let mut ratios = Vec::new();
    let mut cumulative = 0.0;
    for &idx in &order {
        let lambda = eigenvalues[idx].max(0.0);
        let mut comp: Vec<f64> = (0..d).map(|i| vectors[i][idx]).collect();
        // deterministic sign: largest-magnitude entry positive
        let mut dominant = 0usize;
        for (i, c) in comp.iter().enumerate() {
            if c.abs() > comp[dominant].abs() {
                dominant = i;
            }
        }
        if comp[dominant] < 0.0 {
            for c in &mut comp {
                *c = -*c;
            }
        }
        components.push(comp);
        kept_eigenvalues.push(lambda);
        ratios.push(lambda / total);
        cumulative += lambda / total;
        if cumulative >= evr_target - 1e-12 {
            break;
        }
    }
    Ok(PcaModel {
        mean,
        components,
        eigenvalues: kept_eigenvalues,
        explained_variance_ratios: ratios,
    })
}

/// Project one vector: `components * (v - mean)`.
pub fn pca_transform(model: &PcaModel, v: &[f64]) -> Result<Vec<f64>, FusionError> {
    if v.len() != model.input_dim() {
        return Err(FusionError::DimensionMismatch { expected: model.input_dim(), got: v.len() });
    }
    Ok(model
        .components
        .iter()
        .map(|comp| {
            comp.iter()
                .zip(v.iter().zip(&model.mean))
                .map(|(c, (x, mu))| c * (x - mu))
                .sum()
        })
        .collect())
}

/// Quality-proportional weights: `w_v = q_v / (q_v + q_p)`.
pub fn fusion_weights(q_v: f64, q_p: f64) -> Result<FusionWeights, FusionError> {
    if !((0.0..=1.0).contains(&q_v) && (0.0..=1.0).contains(&q_p)) {
        return Err(FusionError::OutOfRange { score: q_v, quality: q_p });
    }
    let total = q_v + q_p;
    if total == 0.0 {
        return Err(FusionError::NoUsableModality);
    }
    Ok(FusionWeights { w_v: q_v / total, w_p: q_p / total })
}

/// Weighted score fusion: `w_v * s_vision + w_p * s_physio`.
pub fn fuse_scores(w: &FusionWeights, s_v: &ModalityScore, s_p: &ModalityScore) -> f64 {
    w.w_v * s_v.score + w.w_p * s_p.score
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physio::{BandPowers, HrvMetrics};
    use crate::vision::VisionValues;
    use alloc::vec;

    fn sample_vision() -> VisionFeatures {
        VisionFeatures {
            values: Some(VisionValues {
                mean_ear: 0.31,
                min_ear: 0.05,
                blink_rate_per_min: 12.0,
                mean_blink_ms: 140.0,
                perclos: 0.04,
                yawn_count: 1,
            }),
            quality: 0.98,
        }
    }

    fn sample_physio() -> PhysioFeatures {
        PhysioFeatures {
            bands: BandPowers { delta: 0.4, theta: 0.3, alpha: 0.2, beta: 0.1 },
            theta_alpha_over_beta: 5.0,
            hrv: HrvMetrics { mean_rr_ms: 900.0, sdnn_ms: 40.0, rmssd_ms: 30.0 },
            eog_variance: 1.2,
            eog_zero_crossing_rate: 3.5,
            quality: 1.0,
        }
    }

    #[test]
    fn concat_orders_vision_first() {
        let fv = concat_features(&sample_vision(), &sample_physio()).unwrap();
        assert_eq!(fv.columns.len(), 16);
        assert!(fv.columns[0].starts_with("v."));
        assert!(fv.columns[6].starts_with("p."));
        assert_eq!(fv.values[0], 0.31);
        assert_eq!(fv.values[6], 0.4);
        assert_eq!(fv.values[15], 3.5);
    }

    #[test]
    fn concat_missing_vision_errors() {
        let fv = VisionFeatures { values: None, quality: 0.0 };
        assert_eq!(
            concat_features(&fv, &sample_physio()),
            Err(FusionError::MissingModality("vision"))
        );
    }

    fn labeled_matrix(cols: Vec<&str>, rows: Vec<Vec<f64>>, labels: Vec<State>) -> FeatureMatrix {
        let n = rows.len();
        FeatureMatrix {
            columns: cols.into_iter().map(|c| c.to_string()).collect(),
            rows,
            labels,
            groups: (0..n).map(|i| alloc::format!("s{i}")).collect(),
        }
    }

    #[test]
    fn mi_perfect_dependence_is_one_bit() {
        let n = 200;
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![(i % 2) as f64]).collect();
        let labels: Vec<State> = (0..n)
            .map(|i| if i % 2 == 0 { State::Alert } else { State::Drowsy })
            .collect();
        let m = labeled_matrix(vec!["x"], rows, labels);
        let ranked = rank_features_mi(&m, 10).unwrap();
        assert!((ranked[0].1 - 1.0).abs() < 1e-9, "mi {}", ranked[0].1);
    }

    #[test]
    fn mi_constant_feature_is_zero() {
        let n = 100;
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![3.0]).collect();
        let labels: Vec<State> = (0..n)
            .map(|i| if i < n / 2 { State::Alert } else { State::Drowsy })
            .collect();
        let m = labeled_matrix(vec!["c"], rows, labels);
        let ranked = rank_features_mi(&m, 10).unwrap();
        assert_eq!(ranked[0].1, 0.0);
    }

    #[test]
    fn mi_single_class_errors() {
        let m = labeled_matrix(
            vec!["x"],
            vec![vec![1.0], vec![2.0]],
            vec![State::Alert, State::Alert],
        );
        assert_eq!(rank_features_mi(&m, 10), Err(FusionError::SingleClassLabels));
    }

    struct FixedWeights(Vec<f64>);
    impl LinearTrainer for FixedWeights {
        fn weights(&self, m: &FeatureMatrix) -> Result<Vec<f64>, FusionError> {
            Ok(self.0[..m.n_cols()].to_vec())
        }
    }

    #[test]
    fn rfe_k_equals_cols_is_identity() {
        let m = labeled_matrix(
            vec!["a", "b"],
            vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 9.0]],
            vec![State::Alert, State::Drowsy, State::Alert],
        );
        let cols = rfe(&m, 2, &FixedWeights(vec![1.0, 2.0])).unwrap();
        assert_eq!(cols, vec!["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn rfe_k_zero_errors() {
        let m = labeled_matrix(
            vec!["a"],
            vec![vec![1.0], vec![2.0]],
            vec![State::Alert, State::Drowsy],
        );
        assert!(matches!(rfe(&m, 0, &FixedWeights(vec![1.0])), Err(FusionError::KOutOfRange { .. })));
    }

    #[test]
    fn scaler_drops_zero_variance_and_centers_train() {
        let m = labeled_matrix(
            vec!["a", "flat"],
            vec![vec![1.0, 7.0], vec![2.0, 7.0], vec![3.0, 7.0]],
            vec![State::Alert, State::Drowsy, State::Alert],
        );
        let scaler = Scaler::fit(&m).unwrap();
        assert_eq!(scaler.dropped, vec!["flat".to_string()]);
        let out = scaler.apply(&m).unwrap();
        let mean: f64 = out.rows.iter().map(|r| r[0]).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-9);
    }

    #[test]
    fn pca_rank_one_data() {
        // points exactly on a line in 3D
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|i| {
                let t = i as f64;
                vec![2.0 * t, -t, 0.5 * t]
            })
            .collect();
        let m = labeled_matrix(vec!["x", "y", "z"], rows, vec![State::Alert; 10]);
        let model = fit_pca(&m, 0.95).unwrap();
        assert_eq!(model.n_components(), 1);
        assert!((model.explained_variance_ratios[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pca_diag_covariance_example() {
        // sample covariance exactly diag(9, 1)
        let a = (13.5f64).sqrt();
        let b = (1.5f64).sqrt();
        let rows = vec![vec![a, 0.0], vec![-a, 0.0], vec![0.0, b], vec![0.0, -b]];
        let m = labeled_matrix(vec!["x", "y"], rows, vec![State::Alert; 4]);
        let model = fit_pca(&m, 0.95).unwrap();
        assert_eq!(model.n_components(), 2, "0.9 < 0.95 forces k = 2");
        assert!((model.explained_variance_ratios[0] - 0.9).abs() < 1e-9);
        assert!((model.explained_variance_ratios[1] - 0.1).abs() < 1e-9);
    }

    #[test]
    fn pca_transform_of_mean_is_zero() {
        let rows = vec![vec![1.0, 2.0], vec![3.0, 5.0], vec![-1.0, 0.5], vec![2.0, 2.5]];
        let m = labeled_matrix(vec!["x", "y"], rows, vec![State::Alert; 4]);
        let model = fit_pca(&m, 1.0).unwrap();
        let out = pca_transform(&model, &model.mean.clone()).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn pca_transform_dimension_mismatch() {
        let rows = vec![vec![1.0, 2.0], vec![3.0, 5.0]];
        let m = labeled_matrix(vec!["x", "y"], rows, vec![State::Alert; 2]);
        let model = fit_pca(&m, 1.0).unwrap();
        assert!(matches!(
            pca_transform(&model, &[1.0]),
            Err(FusionError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pca_full_rank_reconstruction() {
        let mut rng = crate::rng::Rng::new(5);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..4).map(|_| rng.next_gaussian()).collect())
            .collect();
        let m = labeled_matrix(vec!["a", "b", "c", "d"], rows.clone(), vec![State::Alert; 40]);
        let model = fit_pca(&m, 1.0).unwrap();
        assert_eq!(model.n_components(), 4);
        for row in &rows {
            let z = pca_transform(&model, row).unwrap();
            // reconstruct: mean + components^T z
            for i in 0..4 {
                let rec: f64 = model.mean[i]
                    + model
                        .components
                        .iter()
                        .zip(&z)
                        .map(|(c, zi)| c[i] * zi)
                        .sum::<f64>();
                assert!((rec - row[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn weights_worked_examples() {
        let w = fusion_weights(0.9, 0.3).unwrap();
        assert!((w.w_v - 0.75).abs() < 1e-12);
        assert!((w.w_p - 0.25).abs() < 1e-12);
        let eq = fusion_weights(0.4, 0.4).unwrap();
        assert_eq!(eq.w_v, 0.5);
        assert_eq!(fusion_weights(0.0, 0.0), Err(FusionError::NoUsableModality));
    }

    #[test]
    fn fuse_scores_worked_examples() {
        let s = |v| ModalityScore::new(v, 1.0).unwrap();
        let mid = FusionWeights { w_v: 0.5, w_p: 0.5 };
        assert!((fuse_scores(&mid, &s(0.8), &s(0.6)) - 0.7).abs() < 1e-12);
        let all_v = FusionWeights { w_v: 1.0, w_p: 0.0 };
        assert_eq!(fuse_scores(&all_v, &s(0.8), &s(0.6)), 0.8);
        let w = fusion_weights(0.9, 0.3).unwrap();
        assert!((fuse_scores(&w, &s(0.8), &s(0.4)) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn modality_score_range_checked() {
        assert!(ModalityScore::new(1.2, 0.5).is_err());
        assert!(ModalityScore::new(0.5, -0.1).is_err());
    }
}
