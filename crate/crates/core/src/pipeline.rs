//! End-to-end pipeline: feature extraction over windows, model fitting
//! (per-modality heads + fused network), four-path evaluation, and the
//! per-frame streaming engine.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::eval::{self, EvalError, MetricsReport};
use crate::fusion::{
    self, concat_features, fused_column_names, FeatureMatrix, FeatureVector, FusionError, Scaler,
};
use crate::model::{
    self, ClassifierKind, ClassifierModel, LogisticRfeTrainer, ModelError, Preprocess,
    TrainConfig,
};
use crate::physio::{physio_features, PhysioConfig, PhysioError};
use crate::rng::child_seed;
use crate::session::{align_streams, window_session, Session, SessionError, State, Timestamp};
use crate::vision::{vision_features, VisionConfig, VisionError};

/// Alarm smoothing settings for the streaming path.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlarmConfig {
    pub alpha: f64,
    pub threshold: f64,
    pub consecutive: usize,
}

impl Default for AlarmConfig {
    fn default() -> Self {
        Self { alpha: 0.3, threshold: 0.5, consecutive: 3 }
    }
}

/// Every pipeline tunable, with the defaults fixed by the design.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PipelineConfig {
    pub window_s: f64,
    pub stride_s: f64,
    pub tolerance_ms: f64,
    pub vision: VisionConfig,
    pub physio: PhysioConfig,
    /// Features kept after MI pruning + RFE.
    pub select_k: usize,
    pub mi_bins: usize,
    pub evr_target: f64,
    pub train: TrainConfig,
    pub alarm: AlarmConfig,
    pub decision_threshold: f64,
    pub split: (f64, f64, f64),
    pub split_seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            window_s: 60.0,
            stride_s: 5.0,
            tolerance_ms: 10.0,
            vision: VisionConfig::default(),
            physio: PhysioConfig::default(),
            select_k: 10,
            mi_bins: 10,
            evr_target: 0.95,
            train: TrainConfig::default(),
            alarm: AlarmConfig::default(),
            decision_threshold: 0.5,
            split: (0.7, 0.15, 0.15),
            split_seed: 42,
        }
    }
}

/// Feature row for one window, with the per-modality qualities needed by
/// decision fusion.
#[derive(Debug, Clone)]
pub struct WindowRow {
    pub session_id: String,
    pub subject_id: String,
    pub start: Timestamp,
    pub features: FeatureVector,
    pub label: State,
    pub quality_vision: f64,
    pub quality_physio: f64,
}

/// Windows extracted from a set of sessions: feature rows plus counts of
/// windows dropped for missing/degenerate modalities.
#[derive(Debug, Clone, Default)]
pub struct ExtractedFeatures {
    pub rows: Vec<WindowRow>,
    pub dropped_windows: usize,
}

impl ExtractedFeatures {
    pub fn to_matrix(&self) -> FeatureMatrix {
        FeatureMatrix {
            columns: fused_column_names(),
            rows: self.rows.iter().map(|r| r.features.values.clone()).collect(),
            labels: self.rows.iter().map(|r| r.label).collect(),
            groups: self.rows.iter().map(|r| r.subject_id.clone()).collect(),
        }
    }
}

#[derive(Debug)]
pub enum PipelineError {
    Session(SessionError),
    Vision(VisionError),
    Physio(PhysioError),
    Fusion(FusionError),
    Model(ModelError),
    Eval(EvalError),
    NoUsableWindows,
    EmptySplit(&'static str),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Session(e) => write!(f, "session: {e}"),
            PipelineError::Vision(e) => write!(f, "vision: {e}"),
            PipelineError::Physio(e) => write!(f, "physio: {e}"),
            PipelineError::Fusion(e) => write!(f, "fusion: {e}"),
            PipelineError::Model(e) => write!(f, "model: {e}"),
            PipelineError::Eval(e) => write!(f, "eval: {e}"),
            PipelineError::NoUsableWindows => write!(f, "no usable windows after extraction"),
            PipelineError::EmptySplit(which) => write!(f, "empty {which} split"),
        }
    }
}

impl core::error::Error for PipelineError {}

impl From<SessionError> for PipelineError {
    fn from(e: SessionError) -> Self {
        PipelineError::Session(e)
    }
}
impl From<FusionError> for PipelineError {
    fn from(e: FusionError) -> Self {
        PipelineError::Fusion(e)
    }
}
impl From<ModelError> for PipelineError {
    fn from(e: ModelError) -> Self {
        PipelineError::Model(e)
    }
}
impl From<EvalError> for PipelineError {
    fn from(e: EvalError) -> Self {
        PipelineError::Eval(e)
    }
}

/// Align, window, and featurize a set of sessions. Windows missing a
/// modality (no valid frames, absent channel, discarded for artifacts,
/// or non-finite features) are counted and skipped.
pub fn extract_features(
    sessions: &[Session],
    cfg: &PipelineConfig,
) -> Result<ExtractedFeatures, PipelineError> {
    let mut out = ExtractedFeatures::default();
    for session in sessions {
        let aligned = align_streams(session, cfg.tolerance_ms)?;
        let windows = window_session(&aligned, cfg.window_s, cfg.stride_s)?;
        for w in &windows {
            let fv = match vision_features(w, aligned.fps, &cfg.vision) {
                Ok(fv) => fv,
                Err(VisionError::EmptyWindow) => {
                    out.dropped_windows += 1;
                    continue;
                }
                Err(e) => return Err(PipelineError::Vision(e)),
            };
            let fp = match physio_features(w, &cfg.physio) {
                Ok(fp) => fp,
                Err(
                    PhysioError::WindowDiscarded { .. }
                    | PhysioError::MissingChannel(_)
                    | PhysioError::InsufficientPeaks
                    | PhysioError::SignalTooShort { .. }
                    | PhysioError::ZeroVariance,
                ) => {
                    out.dropped_windows += 1;
                    continue;
                }
                Err(e) => return Err(PipelineError::Physio(e)),
            };
            let features = match concat_features(&fv, &fp) {
                Ok(v) => v,
                Err(FusionError::MissingModality(_)) => {
                    out.dropped_windows += 1;
                    continue;
                }
                Err(e) => return Err(PipelineError::Fusion(e)),
            };
            if features.values.iter().any(|v| !v.is_finite()) {
                out.dropped_windows += 1;
                continue;
            }
            out.rows.push(WindowRow {
                session_id: aligned.id.clone(),
                subject_id: aligned.subject_id.clone(),
                start: w.start,
                features,
                label: w.label,
                quality_vision: fv.quality,
                quality_physio: fp.quality,
            });
        }
    }
    if out.rows.is_empty() {
        return Err(PipelineError::NoUsableWindows);
    }
    Ok(out)
}

/// Recorded subject split, kept in the bundle so evaluation can recover
/// the held-out test set.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitInfo {
    pub seed: u64,
    pub train_subjects: Vec<String>,
    pub val_subjects: Vec<String>,
    pub test_subjects: Vec<String>,
}

/// Validation metrics recorded at fit time, one per scoring path.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BundleMetrics {
    pub val: Vec<PathMetrics>,
}

/// The full fitted pipeline: shared fused scaler, selection, PCA, the
/// two modality heads, and the fused network.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PipelineModel {
    pub version: String,
    pub feature_columns: Vec<String>,
    /// Scaler over the full fused feature space.
    pub scaler: Scaler,
    pub selected_columns: Vec<String>,
    pub pca: fusion::PcaModel,
    pub heads: Heads,
    pub fused_net: ClassifierModel,
    pub train_config: TrainConfig,
    pub pipeline_config: PipelineConfig,
    pub split: SplitInfo,
    pub metrics: BundleMetrics,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Heads {
    pub vision: ClassifierModel,
    pub physio: ClassifierModel,
}

pub const MODEL_VERSION: &str = "fusewake-model/1";

/// Scores for one window along every path.
#[derive(Debug, Clone, Copy)]
pub struct WindowScores {
    pub s_vision: f64,
    pub s_physio: f64,
    pub s_feature_fusion: f64,
    pub s_decision_fusion: f64,
}

/// Metrics for one scoring path.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathMetrics {
    pub path: String,
    pub metrics: MetricsReport,
}

/// The evaluation report: one row per scoring path, in the fixed order
/// vision-only, physio-only, feature-fusion, decision-fusion.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub rows: Vec<PathMetrics>,
    pub windows: usize,
    pub dropped_windows: usize,
}

/// Split sessions by subject, extract features, and fit the whole
/// pipeline on the train/validation portions.
pub fn fit_pipeline(
    sessions: &[Session],
    cfg: &PipelineConfig,
) -> Result<PipelineModel, PipelineError> {
    let split = eval::split_dataset(sessions, cfg.split, cfg.split_seed)?;
    let pick = |idx: &[usize]| -> Vec<Session> { idx.iter().map(|&i| sessions[i].clone()).collect() };
    let train_sessions = pick(&split.train);
    let val_sessions = pick(&split.val);
    if train_sessions.is_empty() {
        return Err(PipelineError::EmptySplit("train"));
    }
    if val_sessions.is_empty() {
        return Err(PipelineError::EmptySplit("validation"));
    }

    let train_feat = extract_features(&train_sessions, cfg)?;
    let val_feat = extract_features(&val_sessions, cfg)?;
    let model = fit_pipeline_on_features(&train_feat, &val_feat, cfg)?;

    let subjects = |idx: &[usize]| -> Vec<String> {
        let mut subj: Vec<String> = Vec::new();
        for &i in idx {
            if !subj.contains(&sessions[i].subject_id) {
                subj.push(sessions[i].subject_id.clone());
            }
        }
        subj.sort();
        subj
    };
    let mut model = model;
    model.split = SplitInfo {
        seed: cfg.split_seed,
        train_subjects: subjects(&split.train),
        val_subjects: subjects(&split.val),
        test_subjects: subjects(&split.test),
    };
    Ok(model)
}

/// Fit heads and the fused network from already-extracted features.
pub fn fit_pipeline_on_features(
    train_feat: &ExtractedFeatures,
    val_feat: &ExtractedFeatures,
    cfg: &PipelineConfig,
) -> Result<PipelineModel, PipelineError> {
    let train_m = train_feat.to_matrix();
    let val_m = val_feat.to_matrix();
    train_m.validate()?;
    val_m.validate()?;

    let columns = fused_column_names();
    let vision_cols: Vec<String> = columns.iter().filter(|c| c.starts_with("v.")).cloned().collect();
    let physio_cols: Vec<String> = columns.iter().filter(|c| c.starts_with("p.")).cloned().collect();

    // per-modality heads: own scaler so each runs without the other modality
    let seed = cfg.train.seed;
    let vision_head = fit_head(&train_m, &val_m, &vision_cols, cfg, child_seed(seed, 1))?;
    let physio_head = fit_head(&train_m, &val_m, &physio_cols, cfg, child_seed(seed, 2))?;

    // fused path: scale all columns, MI-prune to 2k, RFE to k, PCA, MLP
    let scaler = Scaler::fit(&train_m)?;
    let train_scaled = scaler.apply(&train_m)?;

    let ranked = fusion::rank_features_mi(&train_scaled, cfg.mi_bins)?;
    let k = cfg.select_k.min(train_scaled.n_cols());
    let shortlist: Vec<String> = ranked
        .iter()
        .take((2 * k).min(train_scaled.n_cols()))
        .map(|(name, _)| name.clone())
        .collect();
    let shortlisted = train_scaled.select(&shortlist)?;
    let trainer = LogisticRfeTrainer { seed: child_seed(seed, 3), ..LogisticRfeTrainer::default() };
    let mut selected_columns = fusion::rfe(&shortlisted, k, &trainer)?;
    // stable order: keep the canonical column order
    selected_columns.sort_by_key(|n| columns.iter().position(|c| c == n));

    let train_selected = train_scaled.select(&selected_columns)?;
    let pca = fusion::fit_pca(&train_selected, cfg.evr_target)?;

    let fused_pre = Preprocess {
        scaler: scaler.clone(),
        selected: Some(selected_columns.clone()),
        pca: Some(pca.clone()),
    };
    let train_reduced = fused_pre.apply_matrix(&train_m)?;
    let val_reduced = fused_pre.apply_matrix(&val_m)?;
    let fused_cfg = TrainConfig { seed: child_seed(seed, 4), ..cfg.train.clone() };
    let mut fused_net = model::train_classifier(
        ClassifierKind::Mlp,
        &train_reduced,
        &val_reduced,
        &fused_cfg,
    )?;
    fused_net.preprocess = Some(fused_pre);

    let mut model = PipelineModel {
        version: MODEL_VERSION.to_string(),
        feature_columns: columns,
        scaler,
        selected_columns,
        pca,
        heads: Heads { vision: vision_head, physio: physio_head },
        fused_net,
        train_config: cfg.train.clone(),
        pipeline_config: cfg.clone(),
        split: SplitInfo::default(),
        metrics: BundleMetrics::default(),
    };
    model.metrics.val = evaluate_rows(&model, &val_feat.rows, cfg.decision_threshold)?.rows;
    Ok(model)
}

fn fit_head(
    train_m: &FeatureMatrix,
    val_m: &FeatureMatrix,
    cols: &[String],
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<ClassifierModel, PipelineError> {
    let train_sub = train_m.select(&cols.to_vec())?;
    let val_sub = val_m.select(&cols.to_vec())?;
    let scaler = Scaler::fit(&train_sub)?;
    let train_s = scaler.apply(&train_sub)?;
    let val_s = scaler.apply(&val_sub)?;
    let head_cfg = TrainConfig { seed, ..cfg.train.clone() };
    let mut head =
        model::train_classifier(ClassifierKind::Logistic, &train_s, &val_s, &head_cfg)?;
    head.preprocess = Some(Preprocess { scaler, selected: None, pca: None });
    Ok(head)
}

/// Score one window's features along all four paths.
pub fn score_window(model: &PipelineModel, row: &WindowRow) -> Result<WindowScores, PipelineError> {
    let s_vision = model::predict_score(&model.heads.vision, &row.features)?;
    let s_physio = model::predict_score(&model.heads.physio, &row.features)?;
    let s_feature_fusion = model::predict_score(&model.fused_net, &row.features)?;
    let w = fusion::fusion_weights(row.quality_vision.clamp(0.0, 1.0), row.quality_physio.clamp(0.0, 1.0))?;
    let s_decision_fusion = w.w_v * s_vision + w.w_p * s_physio;
    Ok(WindowScores { s_vision, s_physio, s_feature_fusion, s_decision_fusion })
}

/// Evaluate all four paths over feature rows.
pub fn evaluate_rows(
    model: &PipelineModel,
    rows: &[WindowRow],
    threshold: f64,
) -> Result<EvalReport, PipelineError> {
    if rows.is_empty() {
        return Err(PipelineError::NoUsableWindows);
    }
    let labels: Vec<State> = rows.iter().map(|r| r.label).collect();
    let mut per_path: [Vec<f64>; 4] = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for row in rows {
        let s = score_window(model, row)?;
        per_path[0].push(s.s_vision);
        per_path[1].push(s.s_physio);
        per_path[2].push(s.s_feature_fusion);
        per_path[3].push(s.s_decision_fusion);
    }

    let names = ["vision-only", "physio-only", "feature-fusion", "decision-fusion"];
    let mut out = Vec::with_capacity(4);
    for (name, scores) in names.iter().zip(&per_path) {
        let predictions: Vec<State> = scores
            .iter()
            .map(|&s| if s > threshold { State::Drowsy } else { State::Alert })
            .collect();
        let cm = eval::confusion(&predictions, &labels)?;
        let mut metrics = eval::classification_metrics(&cm)?;
        metrics.auc = eval::roc_auc(scores, &labels).ok().map(|(_, auc)| auc);
        out.push(PathMetrics { path: name.to_string(), metrics });
    }
    Ok(EvalReport { rows: out, windows: rows.len(), dropped_windows: 0 })
}

/// Evaluate a trained pipeline over sessions, all four paths.
pub fn evaluate_pipeline(
    model: &PipelineModel,
    sessions: &[Session],
) -> Result<EvalReport, PipelineError> {
    let cfg = &model.pipeline_config;
    let feat = extract_features(sessions, cfg)?;
    let mut report = evaluate_rows(model, &feat.rows, cfg.decision_threshold)?;
    report.dropped_windows = feat.dropped_windows;
    Ok(report)
}

/// One emitted stream record: scores become available at the window end.
#[derive(Debug, Clone, Copy)]
pub struct StreamRecord {
    /// Window end time, microseconds.
    pub t_us: i64,
    /// `None` when the modality had no usable data in the window.
    pub s_vision: Option<f64>,
    pub s_physio: Option<f64>,
    /// Decision-fusion score (EMA-smoothed scores drive the alarm).
    pub s_fused: f64,
    pub alarm: bool,
}

/// Per-frame replay over one session: cheap per-frame work plus a
/// window-level recompute whenever a stride boundary passes.
pub struct StreamEngine<'a> {
    session: Session,
    model: &'a PipelineModel,
    duration_us: i64,
    frame_cursor: usize,
    next_window_end_us: i64,
    window_us: i64,
    stride_us: i64,
    ema: Option<f64>,
    above_run: usize,
    armed: bool,
}

impl<'a> StreamEngine<'a> {
    pub fn new(session: &Session, model: &'a PipelineModel) -> Result<Self, PipelineError> {
        let cfg = &model.pipeline_config;
        let aligned = align_streams(session, cfg.tolerance_ms)?;
        let window_us = (cfg.window_s * 1e6).round() as i64;
        let stride_us = (cfg.stride_s * 1e6).round() as i64;
        let duration_us = (aligned.duration_secs() * 1e6).round() as i64;
        Ok(Self {
            session: aligned,
            model,
            duration_us,
            frame_cursor: 0,
            next_window_end_us: window_us,
            window_us,
            stride_us,
            ema: None,
            above_run: 0,
            armed: true,
        })
    }

    pub fn n_frames(&self) -> usize {
        self.session.frames.len()
    }

    pub fn fps(&self) -> f64 {
        self.session.fps
    }

    /// Process the next frame; returns a record when this frame closes a
    /// window.
    pub fn advance(&mut self) -> Result<Option<StreamRecord>, PipelineError> {
        if self.frame_cursor >= self.session.frames.len() {
            return Ok(None);
        }
        let t_us = self.session.frames[self.frame_cursor].t.micros();
        self.frame_cursor += 1;
        if t_us < self.next_window_end_us {
            return Ok(None);
        }
        let end_us = self.next_window_end_us;
        self.next_window_end_us += self.stride_us;
        Ok(Some(self.score_window_at(end_us)?))
    }

    /// Emit the windows whose end falls after the last frame but within
    /// the session (the replay has all the data once frames run out).
    pub fn finish(&mut self) -> Result<Vec<StreamRecord>, PipelineError> {
        let mut out = Vec::new();
        while self.next_window_end_us <= self.duration_us {
            let end_us = self.next_window_end_us;
            self.next_window_end_us += self.stride_us;
            out.push(self.score_window_at(end_us)?);
        }
        Ok(out)
    }

    fn score_window_at(&mut self, end_us: i64) -> Result<StreamRecord, PipelineError> {
        let cfg = &self.model.pipeline_config;
        let start_us = end_us - self.window_us;
        let window = crate::session::window_at(&self.session, start_us, cfg.window_s);

        let fv = vision_features(&window, self.session.fps, &cfg.vision)
            .map_err(PipelineError::Vision)?;
        let fp = physio_features(&window, &cfg.physio);

        let mut s_vision = None;
        let mut s_physio = None;
        let mut q_v = 0.0;
        let mut q_p = 0.0;
        if let (Some(_), Ok(fp_ok)) = (&fv.values, &fp) {
            if let Ok(features) = concat_features(&fv, fp_ok) {
                let row_stub = WindowRow {
                    session_id: self.session.id.clone(),
                    subject_id: self.session.subject_id.clone(),
                    start: Timestamp(start_us),
                    features,
                    label: window.label,
                    quality_vision: fv.quality,
                    quality_physio: fp_ok.quality,
                };
                let s = score_window(self.model, &row_stub)?;
                s_vision = Some(s.s_vision);
                s_physio = Some(s.s_physio);
                q_v = fv.quality;
                q_p = fp_ok.quality;
            }
        }
        // degrade gracefully when one modality is unusable
        let s_fused = match (s_vision, s_physio) {
            (Some(v), Some(p)) => {
                let w = fusion::fusion_weights(q_v.clamp(0.0, 1.0), q_p.clamp(0.0, 1.0))?;
                w.w_v * v + w.w_p * p
            }
            (Some(v), None) => v,
            (None, Some(p)) => p,
            (None, None) => 0.5,
        };

        let alarm_cfg = &cfg.alarm;
        let ema = match self.ema {
            None => s_fused,
            Some(prev) => alarm_cfg.alpha * s_fused + (1.0 - alarm_cfg.alpha) * prev,
        };
        self.ema = Some(ema);
        let mut alarm = false;
        if ema > alarm_cfg.threshold {
            self.above_run += 1;
            if self.armed && self.above_run >= alarm_cfg.consecutive {
                alarm = true;
                self.armed = false;
            }
        } else {
            self.above_run = 0;
            self.armed = true;
        }

        Ok(StreamRecord { t_us: end_us, s_vision, s_physio, s_fused, alarm })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_dataset_with, GenParams};

    fn small_dataset() -> Vec<Session> {
        generate_dataset_with(9, 8, 4, 150.0, &GenParams::default()).unwrap()
    }

    #[test]
    fn extract_produces_rows_with_qualities() {
        let sessions = small_dataset();
        let cfg = PipelineConfig::default();
        let feat = extract_features(&sessions[..2], &cfg).unwrap();
        assert!(!feat.rows.is_empty());
        for r in &feat.rows {
            assert!((0.0..=1.0).contains(&r.quality_vision));
            assert!((0.0..=1.0).contains(&r.quality_physio));
            assert_eq!(r.features.values.len(), 16);
        }
    }

    #[test]
    fn fit_and_evaluate_four_paths() {
        let sessions = small_dataset();
        let cfg = PipelineConfig {
            split: (0.5, 0.25, 0.25),
            train: TrainConfig { max_epochs: 30, patience: 5, ..TrainConfig::default() },
            ..PipelineConfig::default()
        };
        let model = fit_pipeline(&sessions, &cfg).unwrap();
        assert_eq!(model.version, MODEL_VERSION);
        assert!(!model.split.test_subjects.is_empty());
        assert!(model.selected_columns.len() <= cfg.select_k);

        let report = evaluate_pipeline(&model, &sessions[..2]).unwrap();
        assert_eq!(report.rows.len(), 4);
        let names: Vec<&str> = report.rows.iter().map(|r| r.path.as_str()).collect();
        assert_eq!(names, ["vision-only", "physio-only", "feature-fusion", "decision-fusion"]);
        for row in &report.rows {
            assert!(row.metrics.auc.is_some());
        }
    }

    #[test]
    fn stream_engine_emits_records_on_stride() {
        let sessions = small_dataset();
        let cfg = PipelineConfig {
            split: (0.5, 0.25, 0.25),
            train: TrainConfig { max_epochs: 20, patience: 4, ..TrainConfig::default() },
            ..PipelineConfig::default()
        };
        let model = fit_pipeline(&sessions, &cfg).unwrap();
        let mut engine = StreamEngine::new(&sessions[0], &model).unwrap();
        let mut records = Vec::new();
        for _ in 0..engine.n_frames() {
            if let Some(rec) = engine.advance().unwrap() {
                records.push(rec);
            }
        }
        records.extend(engine.finish().unwrap());
        // 150 s session, window 60, stride 5 -> 19 windows
        assert_eq!(records.len(), 19);
        assert_eq!(records[0].t_us, 60_000_000);
        assert_eq!(records[1].t_us, 65_000_000);
        for r in &records {
            assert!((0.0..=1.0).contains(&r.s_fused));
        }
    }
}
