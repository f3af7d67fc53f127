//! Visual features from landmark frames: eye aspect ratio, blinks,
//! PERCLOS, yawns, and the valid-frame quality measure.

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::session::Window;

/// Six eye landmarks in the standard order: `p1`/`p4` are the horizontal
/// corners, `p2`/`p3` the upper lid, `p6`/`p5` the lower lid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EyeLandmarks {
    pub points: [[f64; 2]; 6],
}

impl EyeLandmarks {
    pub fn new(points: [[f64; 2]; 6]) -> Self {
        Self { points }
    }
}

/// A detected blink: a maximal run of below-threshold frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlinkEvent {
    pub onset_frame: usize,
    pub duration_frames: usize,
    pub duration_ms: f64,
}

/// Per-window visual features. `values` is `None` when the window had no
/// valid frame (quality 0).
#[derive(Debug, Clone, PartialEq)]
pub struct VisionFeatures {
    pub values: Option<VisionValues>,
    /// Fraction of frames that were valid and measurable, in `[0, 1]`.
    pub quality: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisionValues {
    pub mean_ear: f64,
    pub min_ear: f64,
    pub blink_rate_per_min: f64,
    pub mean_blink_ms: f64,
    pub perclos: f64,
    pub yawn_count: usize,
}

pub const VISION_FEATURE_NAMES: [&str; 6] = [
    "mean_ear",
    "min_ear",
    "blink_rate_per_min",
    "mean_blink_ms",
    "perclos",
    "yawn_count",
];

impl VisionValues {
    pub fn to_vec(&self) -> Vec<f64> {
        alloc::vec![
            self.mean_ear,
            self.min_ear,
            self.blink_rate_per_min,
            self.mean_blink_ms,
            self.perclos,
            self.yawn_count as f64,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisionConfig {
    /// EAR below this counts as a closed eye (blink/PERCLOS threshold).
    pub ear_closed_threshold: f64,
    /// Minimum consecutive closed frames for a blink.
    pub blink_min_frames: usize,
    /// MAR above this counts as an open mouth.
    pub mar_yawn_threshold: f64,
    /// Minimum open-mouth duration for a yawn, seconds.
    pub yawn_min_s: f64,
}

impl Default for VisionConfig {
    fn default() -> Self {
        Self {
            ear_closed_threshold: 0.2,
            blink_min_frames: 2,
            mar_yawn_threshold: 0.6,
            yawn_min_s: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VisionError {
    DegenerateEye,
    DegenerateMouth,
    EmptySeries,
    EmptyWindow,
    BadRate(f64),
    BadMinFrames,
}

impl fmt::Display for VisionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VisionError::DegenerateEye => write!(f, "degenerate eye: p1 == p4"),
            VisionError::DegenerateMouth => write!(f, "degenerate mouth: m1 == m5"),
            VisionError::EmptySeries => write!(f, "empty series"),
            VisionError::EmptyWindow => write!(f, "window contains no frames"),
            VisionError::BadRate(fps) => write!(f, "fps must be positive, got {fps}"),
            VisionError::BadMinFrames => write!(f, "min_frames must be >= 1"),
        }
    }
}

impl core::error::Error for VisionError {}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// Eye aspect ratio `(|p2-p6| + |p3-p5|) / (2 |p1-p4|)`.
pub fn ear(eye: &EyeLandmarks) -> Result<f64, VisionError> {
    let p = &eye.points;
    let horizontal = dist(p[0], p[3]);
    if horizontal <= 0.0 {
        return Err(VisionError::DegenerateEye);
    }
    Ok((dist(p[1], p[5]) + dist(p[2], p[4])) / (2.0 * horizontal))
}

/// Mouth aspect ratio over 8 points:
/// `(|m2-m8| + |m3-m7| + |m4-m6|) / (3 |m1-m5|)`.
pub fn mar(mouth: &[[f64; 2]; 8]) -> Result<f64, VisionError> {
    let horizontal = dist(mouth[0], mouth[4]);
    if horizontal <= 0.0 {
        return Err(VisionError::DegenerateMouth);
    }
    Ok((dist(mouth[1], mouth[7]) + dist(mouth[2], mouth[6]) + dist(mouth[3], mouth[5]))
        / (3.0 * horizontal))
}

/// Blinks are maximal runs of at least `min_frames` consecutive EAR values
/// below `threshold`; runs touching the series boundaries count.
pub fn detect_blinks(
    ear_series: &[f64],
    fps: f64,
    threshold: f64,
    min_frames: usize,
) -> Result<Vec<BlinkEvent>, VisionError> {
    if ear_series.is_empty() {
        return Err(VisionError::EmptySeries);
    }
    if !(fps.is_finite() && fps > 0.0) {
        return Err(VisionError::BadRate(fps));
    }
    if min_frames == 0 {
        return Err(VisionError::BadMinFrames);
    }
    let mut blinks = Vec::new();
    let mut run_start: Option<usize> = None;
    for (i, &v) in ear_series.iter().enumerate() {
        if v < threshold {
            run_start.get_or_insert(i);
        } else if let Some(start) = run_start.take() {
            push_run(&mut blinks, start, i - start, fps, min_frames);
        }
    }
    if let Some(start) = run_start {
        push_run(&mut blinks, start, ear_series.len() - start, fps, min_frames);
    }
    Ok(blinks)
}

fn push_run(blinks: &mut Vec<BlinkEvent>, start: usize, len: usize, fps: f64, min_frames: usize) {
    if len >= min_frames {
        blinks.push(BlinkEvent {
            onset_frame: start,
            duration_frames: len,
            duration_ms: len as f64 * 1000.0 / fps,
        });
    }
}

/// Fraction of EAR values below `threshold`.
pub fn perclos(ear_series: &[f64], threshold: f64) -> Result<f64, VisionError> {
    if ear_series.is_empty() {
        return Err(VisionError::EmptySeries);
    }
    let below = ear_series.iter().filter(|&&v| v < threshold).count();
    Ok(below as f64 / ear_series.len() as f64)
}

/// Count yawns: maximal runs with MAR above `mar_threshold` lasting at
/// least `min_s` seconds.
pub fn detect_yawns(
    mouth_series: &[[[f64; 2]; 8]],
    fps: f64,
    mar_threshold: f64,
    min_s: f64,
) -> Result<usize, VisionError> {
    if !(fps.is_finite() && fps > 0.0) {
        return Err(VisionError::BadRate(fps));
    }
    let mut count = 0;
    let mut run = 0usize;
    for mouth in mouth_series {
        if mar(mouth)? > mar_threshold {
            run += 1;
        } else {
            if run as f64 / fps >= min_s - 1e-9 {
                count += 1;
            }
            run = 0;
        }
    }
    if run as f64 / fps >= min_s - 1e-9 {
        count += 1;
    }
    Ok(count)
}

/// Extract per-window visual features.
///
/// Each valid frame contributes the mean of its two eye EARs (one eye
/// alone if the other is degenerate). Invalid frames are excluded; blink
/// statistics, PERCLOS, and yawns run over the concatenated valid
/// subsequence. Quality is the measurable-frame fraction; with zero valid
/// frames the features are reported missing at quality 0.
pub fn vision_features(window: &Window<'_>, fps: f64, cfg: &VisionConfig) -> Result<VisionFeatures, VisionError> {
    if window.frames.is_empty() {
        return Err(VisionError::EmptyWindow);
    }
    if !(fps.is_finite() && fps > 0.0) {
        return Err(VisionError::BadRate(fps));
    }

    let mut ears = Vec::with_capacity(window.frames.len());
    let mut mouths = Vec::with_capacity(window.frames.len());
    for fr in window.frames {
        if !fr.valid {
            continue;
        }
        let left = ear(&EyeLandmarks::new(fr.left_eye)).ok();
        let right = ear(&EyeLandmarks::new(fr.right_eye)).ok();
        let frame_ear = match (left, right) {
            (Some(l), Some(r)) => Some((l + r) / 2.0),
            (Some(l), None) => Some(l),
            (None, Some(r)) => Some(r),
            (None, None) => None,
        };
        if let Some(e) = frame_ear {
            ears.push(e);
            mouths.push(fr.mouth);
        }
    }

    let quality = ears.len() as f64 / window.frames.len() as f64;
    if ears.is_empty() {
        return Ok(VisionFeatures { values: None, quality: 0.0 });
    }

    let blinks = detect_blinks(&ears, fps, cfg.ear_closed_threshold, cfg.blink_min_frames)?;
    let minutes = ears.len() as f64 / fps / 60.0;
    let blink_rate_per_min = blinks.len() as f64 / minutes;
    let mean_blink_ms = if blinks.is_empty() {
        0.0
    } else {
        blinks.iter().map(|b| b.duration_ms).sum::<f64>() / blinks.len() as f64
    };
    let values = VisionValues {
        mean_ear: ears.iter().sum::<f64>() / ears.len() as f64,
        min_ear: ears.iter().cloned().fold(f64::INFINITY, f64::min),
        blink_rate_per_min,
        mean_blink_ms,
        perclos: perclos(&ears, cfg.ear_closed_threshold)?,
        yawn_count: detect_yawns(&mouths, fps, cfg.mar_yawn_threshold, cfg.yawn_min_s)?,
    };
    Ok(VisionFeatures { values: Some(values), quality })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn spec_eye() -> EyeLandmarks {
        EyeLandmarks::new([
            [0.0, 0.0],
            [1.0, 1.0],
            [3.0, 1.0],
            [4.0, 0.0],
            [3.0, -1.0],
            [1.0, -1.0],
        ])
    }

    #[test]
    fn ear_worked_example() {
        assert!((ear(&spec_eye()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ear_closed_eye_is_zero() {
        let eye = EyeLandmarks::new([
            [0.0, 0.0],
            [1.0, 0.0],
            [3.0, 0.0],
            [4.0, 0.0],
            [3.0, 0.0],
            [1.0, 0.0],
        ]);
        assert_eq!(ear(&eye).unwrap(), 0.0);
    }

    #[test]
    fn ear_scale_invariant() {
        let mut scaled = spec_eye();
        for p in scaled.points.iter_mut() {
            p[0] *= 3.7;
            p[1] *= 3.7;
        }
        assert!((ear(&scaled).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ear_degenerate_errors() {
        let eye = EyeLandmarks::new([[1.0, 1.0]; 6]);
        assert_eq!(ear(&eye), Err(VisionError::DegenerateEye));
    }

    #[test]
    fn blinks_none_above_threshold() {
        let series = vec![0.35; 20];
        assert!(detect_blinks(&series, 30.0, 0.2, 2).unwrap().is_empty());
    }

    #[test]
    fn blinks_hand_traced_run() {
        let series = [0.3, 0.3, 0.15, 0.10, 0.12, 0.3, 0.3];
        let blinks = detect_blinks(&series, 30.0, 0.2, 2).unwrap();
        assert_eq!(blinks.len(), 1);
        assert_eq!(blinks[0].onset_frame, 2);
        assert_eq!(blinks[0].duration_frames, 3);
        assert!((blinks[0].duration_ms - 100.0).abs() < 1e-9);
    }

    #[test]
    fn blinks_min_frames_gate() {
        let series = [0.15, 0.3, 0.15];
        assert!(detect_blinks(&series, 30.0, 0.2, 2).unwrap().is_empty());
    }

    #[test]
    fn blinks_run_touching_boundary_counts() {
        let series = [0.1, 0.1, 0.3, 0.1, 0.1];
        let blinks = detect_blinks(&series, 30.0, 0.2, 2).unwrap();
        assert_eq!(blinks.len(), 2);
        assert_eq!(blinks[1].onset_frame, 3);
    }

    #[test]
    fn blinks_empty_series_errors() {
        assert_eq!(detect_blinks(&[], 30.0, 0.2, 2), Err(VisionError::EmptySeries));
    }

    #[test]
    fn perclos_counting() {
        let series = [0.1, 0.1, 0.1, 0.1, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3];
        assert!((perclos(&series, 0.2).unwrap() - 0.4).abs() < 1e-12);
        assert_eq!(perclos(&[0.1, 0.15], 0.2).unwrap(), 1.0);
        assert_eq!(perclos(&[0.3, 0.4], 0.2).unwrap(), 0.0);
    }

    fn mouth_with_mar(m: f64) -> [[f64; 2]; 8] {
        let w = 4.0;
        let h = m * w / 2.0;
        [
            [0.0, 0.0],
            [1.0, h],
            [2.0, h],
            [3.0, h],
            [w, 0.0],
            [3.0, -h],
            [2.0, -h],
            [1.0, -h],
        ]
    }

    #[test]
    fn mar_worked_example() {
        // m1=(0,0), m5=(4,0), vertical pairs separated by 2 -> MAR 0.5
        assert!((mar(&mouth_with_mar(0.5)).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn yawn_run_rule() {
        let fps = 30.0;
        let open: Vec<_> = (0..60).map(|_| mouth_with_mar(0.7)).collect();
        assert_eq!(detect_yawns(&open, fps, 0.6, 1.5).unwrap(), 1);
        let closed: Vec<_> = (0..60).map(|_| mouth_with_mar(0.4)).collect();
        assert_eq!(detect_yawns(&closed, fps, 0.6, 1.5).unwrap(), 0);
    }

    #[test]
    fn yawn_short_run_ignored() {
        let mut series: Vec<_> = (0..30).map(|_| mouth_with_mar(0.7)).collect();
        series.extend((0..30).map(|_| mouth_with_mar(0.3)));
        // 1 s open < 1.5 s minimum
        assert_eq!(detect_yawns(&series, 30.0, 0.6, 1.5).unwrap(), 0);
    }

    #[test]
    fn vision_features_quality_fraction() {
        let mut s = crate::session::testutil::toy_session(2.0, 30.0, 256.0);
        for (i, fr) in s.frames.iter_mut().enumerate() {
            fr.valid = i % 2 == 0;
        }
        let windows = crate::session::window_session(&s, 2.0, 2.0).unwrap();
        let f = vision_features(&windows[0], 30.0, &VisionConfig::default()).unwrap();
        assert!((f.quality - 0.5).abs() < 1e-12);
        assert!(f.values.is_some());
    }

    #[test]
    fn vision_features_all_invalid_flags_missing() {
        let mut s = crate::session::testutil::toy_session(2.0, 30.0, 256.0);
        for fr in &mut s.frames {
            fr.valid = false;
        }
        let windows = crate::session::window_session(&s, 2.0, 2.0).unwrap();
        let f = vision_features(&windows[0], 30.0, &VisionConfig::default()).unwrap();
        assert_eq!(f.quality, 0.0);
        assert!(f.values.is_none());
    }
}
