//! Physiological signal conditioning and features: zero-phase bandpass,
//! z-score normalization, EEG band powers, pulse-peak HRV, and EOG
//! statistics.

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dsp;
use crate::session::{Channel, Window};

/// Band edges in Hz: delta 0.5-4, theta 4-8, alpha 8-13, beta 13-30.
pub const BAND_EDGES: [(f64, f64); 4] = [(0.5, 4.0), (4.0, 8.0), (8.0, 13.0), (13.0, 30.0)];

/// Recursive bandpass specification. The filter is a Butterworth
/// high-pass at `lo_hz` cascaded with a Butterworth low-pass at `hi_hz`,
/// each of the given order, applied forward and backward (zero phase).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FilterSpec {
    pub lo_hz: f64,
    pub hi_hz: f64,
    pub order: usize,
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self { lo_hz: 0.5, hi_hz: 40.0, order: 4 }
    }
}

impl FilterSpec {
    pub fn validate(&self, fs: f64) -> Result<(), PhysioError> {
        if !(self.lo_hz > 0.0 && self.lo_hz < self.hi_hz && self.hi_hz < fs / 2.0) {
            return Err(PhysioError::BandOutOfRange {
                lo_hz: self.lo_hz,
                hi_hz: self.hi_hz,
                fs,
            });
        }
        if self.order == 0 {
            return Err(PhysioError::BadOrder);
        }
        Ok(())
    }
}

/// Mean and sample standard deviation (N-1) of a raw signal.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalizationStats {
    pub mu: f64,
    pub sigma: f64,
}

/// Integrated spectral power per EEG band.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandPowers {
    pub delta: f64,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl BandPowers {
    pub fn total(&self) -> f64 {
        self.delta + self.theta + self.alpha + self.beta
    }

    /// The drowsiness marker `(theta + alpha) / beta`. NaN when beta is 0.
    pub fn theta_alpha_over_beta(&self) -> f64 {
        (self.theta + self.alpha) / self.beta
    }
}

/// Time-domain heart-rate variability over RR intervals (ms).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HrvMetrics {
    pub mean_rr_ms: f64,
    pub sdnn_ms: f64,
    pub rmssd_ms: f64,
}

/// Per-window physiological features.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysioFeatures {
    pub bands: BandPowers,
    pub theta_alpha_over_beta: f64,
    pub hrv: HrvMetrics,
    pub eog_variance: f64,
    /// Zero crossings of the normalized EOG per second.
    pub eog_zero_crossing_rate: f64,
    /// Clean-sample fraction across channels, in `[0, 1]`.
    pub quality: f64,
}

pub const PHYSIO_FEATURE_NAMES: [&str; 10] = [
    "eeg_delta",
    "eeg_theta",
    "eeg_alpha",
    "eeg_beta",
    "eeg_theta_alpha_over_beta",
    "mean_rr_ms",
    "sdnn_ms",
    "rmssd_ms",
    "eog_variance",
    "eog_zcr",
];

impl PhysioFeatures {
    pub fn to_vec(&self) -> Vec<f64> {
        alloc::vec![
            self.bands.delta,
            self.bands.theta,
            self.bands.alpha,
            self.bands.beta,
            self.theta_alpha_over_beta,
            self.hrv.mean_rr_ms,
            self.hrv.sdnn_ms,
            self.hrv.rmssd_ms,
            self.eog_variance,
            self.eog_zero_crossing_rate,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhysioConfig {
    pub filter: FilterSpec,
    /// Clip limit in multiples of the window's own std.
    pub clip_sigma: f64,
    /// Windows with more than this clipped fraction are discarded.
    pub max_clip_fraction: f64,
    /// Welch segment length, seconds.
    pub welch_segment_s: f64,
    /// Peak threshold in stds above the mean of the conditioned signal.
    pub peak_threshold_sigmas: f64,
    /// Minimum spacing between accepted pulse peaks, ms.
    pub peak_refractory_ms: f64,
}

impl Default for PhysioConfig {
    fn default() -> Self {
        Self {
            filter: FilterSpec::default(),
            clip_sigma: 5.0,
            max_clip_fraction: 0.2,
            welch_segment_s: 2.0,
            peak_threshold_sigmas: 0.5,
            peak_refractory_ms: 300.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhysioError {
    SignalTooShort { len: usize, needed: usize },
    BandOutOfRange { lo_hz: f64, hi_hz: f64, fs: f64 },
    BadOrder,
    ZeroVariance,
    InsufficientPeaks,
    TooFewIntervals,
    MissingChannel(Channel),
    /// Window rejected: clipped fraction above the configured limit.
    WindowDiscarded { channel: Channel, clipped_fraction: f64 },
}

impl fmt::Display for PhysioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhysioError::SignalTooShort { len, needed } => {
                write!(f, "signal too short: {len} samples, need {needed}")
            }
            PhysioError::BandOutOfRange { lo_hz, hi_hz, fs } => {
                write!(f, "band {lo_hz}-{hi_hz} Hz invalid for fs {fs}")
            }
            PhysioError::BadOrder => write!(f, "filter order must be >= 1"),
            PhysioError::ZeroVariance => write!(f, "zero variance signal"),
            PhysioError::InsufficientPeaks => write!(f, "insufficient peaks"),
            PhysioError::TooFewIntervals => write!(f, "need at least 2 RR intervals"),
            PhysioError::MissingChannel(c) => write!(f, "channel {c} absent from window"),
            PhysioError::WindowDiscarded { channel, clipped_fraction } => write!(
                f,
                "window discarded: {channel} has {:.1}% clipped samples",
                clipped_fraction * 100.0
            ),
        }
    }
}

impl core::error::Error for PhysioError {}

/// Zero-phase bandpass. Output has the same length as the input.
pub fn bandpass(signal: &[f64], fs: f64, spec: &FilterSpec) -> Result<Vec<f64>, PhysioError> {
    spec.validate(fs)?;
    let needed = 3 * spec.order;
    if signal.len() < needed {
        return Err(PhysioError::SignalTooShort { len: signal.len(), needed });
    }
    let mut secs = dsp::butter_highpass(spec.order, spec.lo_hz, fs);
    secs.extend(dsp::butter_lowpass(spec.order, spec.hi_hz, fs));
    let padlen = 3 * (2 * spec.order + 1);
    Ok(dsp::filtfilt(&secs, signal, padlen))
}

/// z-score normalization with sample std (N-1):
/// `out_i = (x_i - mu) / sigma`.
pub fn zscore(signal: &[f64]) -> Result<(Vec<f64>, NormalizationStats), PhysioError> {
    if signal.len() < 2 {
        return Err(PhysioError::SignalTooShort { len: signal.len(), needed: 2 });
    }
    let n = signal.len() as f64;
    let mu = signal.iter().sum::<f64>() / n;
    let var = signal.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (n - 1.0);
    let sigma = var.sqrt();
    if sigma == 0.0 {
        return Err(PhysioError::ZeroVariance);
    }
    let out = signal.iter().map(|x| (x - mu) / sigma).collect();
    Ok((out, NormalizationStats { mu, sigma }))
}

/// Band powers from an averaged periodogram (Hann taper, 50% overlap,
/// segments of `welch_segment_s`, default 2 s). Band power is the PSD
/// integral over each band, half-open `[lo, hi)` in bins.
pub fn band_powers(signal: &[f64], fs: f64) -> Result<BandPowers, PhysioError> {
    band_powers_with(signal, fs, 2.0)
}

pub fn band_powers_with(
    signal: &[f64],
    fs: f64,
    segment_s: f64,
) -> Result<BandPowers, PhysioError> {
    let seg_len = (segment_s * fs).round() as usize;
    if signal.len() < seg_len || seg_len < 2 {
        return Err(PhysioError::SignalTooShort { len: signal.len(), needed: seg_len.max(2) });
    }
    let (freqs, psd) = dsp::welch_psd(signal, fs, seg_len);
    let df = fs / seg_len as f64;
    let integrate = |lo: f64, hi: f64| -> f64 {
        freqs
            .iter()
            .zip(&psd)
            .filter(|(f, _)| **f >= lo - 1e-9 && **f < hi - 1e-9)
            .map(|(_, p)| p * df)
            .sum()
    };
    Ok(BandPowers {
        delta: integrate(BAND_EDGES[0].0, BAND_EDGES[0].1),
        theta: integrate(BAND_EDGES[1].0, BAND_EDGES[1].1),
        alpha: integrate(BAND_EDGES[2].0, BAND_EDGES[2].1),
        beta: integrate(BAND_EDGES[3].0, BAND_EDGES[3].1),
    })
}

/// Total PSD integral over `[lo, hi)` Hz; used by the band/total checks.
pub fn power_in_band(signal: &[f64], fs: f64, lo: f64, hi: f64) -> Result<f64, PhysioError> {
    let seg_len = (2.0 * fs).round() as usize;
    if signal.len() < seg_len {
        return Err(PhysioError::SignalTooShort { len: signal.len(), needed: seg_len });
    }
    let (freqs, psd) = dsp::welch_psd(signal, fs, seg_len);
    let df = fs / seg_len as f64;
    Ok(freqs
        .iter()
        .zip(&psd)
        .filter(|(f, _)| **f >= lo - 1e-9 && **f < hi - 1e-9)
        .map(|(_, p)| p * df)
        .sum())
}

/// Detect pulse peaks and return the RR intervals in ms.
///
/// Peaks are local maxima above `mean + 0.5 std` of the signal, accepted
/// left to right with a 300 ms refractory gap (both tunable via
/// [`PhysioConfig`] through [`detect_pulse_peaks_with`]).
pub fn detect_pulse_peaks(signal: &[f64], fs: f64) -> Result<Vec<f64>, PhysioError> {
    detect_pulse_peaks_with(signal, fs, 0.5, 300.0)
}

pub fn detect_pulse_peaks_with(
    signal: &[f64],
    fs: f64,
    threshold_sigmas: f64,
    refractory_ms: f64,
) -> Result<Vec<f64>, PhysioError> {
    let needed = (2.0 * fs) as usize;
    if signal.len() < needed {
        return Err(PhysioError::SignalTooShort { len: signal.len(), needed });
    }
    let n = signal.len() as f64;
    let mean = signal.iter().sum::<f64>() / n;
    let var = signal.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let threshold = mean + threshold_sigmas * var.sqrt();
    let refractory = refractory_ms * 1e-3 * fs;

    let mut peaks: Vec<usize> = Vec::new();
    for i in 1..signal.len() - 1 {
        if signal[i] > threshold && signal[i] > signal[i - 1] && signal[i] >= signal[i + 1] {
            if let Some(&last) = peaks.last() {
                if ((i - last) as f64) < refractory {
                    continue;
                }
            }
            peaks.push(i);
        }
    }
    if peaks.len() < 2 {
        return Err(PhysioError::InsufficientPeaks);
    }
    Ok(peaks
        .windows(2)
        .map(|p| (p[1] - p[0]) as f64 * 1000.0 / fs)
        .collect())
}

/// SDNN (sample std, N-1) and RMSSD over RR intervals.
pub fn hrv_metrics(rr_ms: &[f64]) -> Result<HrvMetrics, PhysioError> {
    if rr_ms.len() < 2 {
        return Err(PhysioError::TooFewIntervals);
    }
    let n = rr_ms.len() as f64;
    let mean = rr_ms.iter().sum::<f64>() / n;
    let var = rr_ms.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let sq_diff_mean = rr_ms
        .windows(2)
        .map(|p| (p[1] - p[0]) * (p[1] - p[0]))
        .sum::<f64>()
        / (rr_ms.len() - 1) as f64;
    Ok(HrvMetrics {
        mean_rr_ms: mean,
        sdnn_ms: var.sqrt(),
        rmssd_ms: sq_diff_mean.sqrt(),
    })
}

/// Conditioned signal plus artifact accounting for one channel.
struct Conditioned {
    normalized: Vec<f64>,
    stats: NormalizationStats,
    clipped: usize,
    total: usize,
}

fn median_of(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Artifact rejection -> bandpass -> z-score for one channel.
///
/// Samples beyond `clip_sigma` scale units from the window's centre are
/// treated as rail artifacts and linearly interpolated from their clean
/// neighbours; a channel with more than `max_clip_fraction` flagged
/// samples rejects the whole window. The scale unit is the MAD-based
/// robust std for EEG (a plain std is inflated by the very artifacts it
/// must detect, so the 20% discard rule could never fire) and the classic
/// std for EOG/PULSE, whose sparse deflections would themselves look like
/// outliers to a median-based estimate.
fn condition(
    channel: Channel,
    samples: &[f64],
    fs: f64,
    cfg: &PhysioConfig,
) -> Result<Conditioned, PhysioError> {
    let n = samples.len();
    if n < 2 {
        return Err(PhysioError::SignalTooShort { len: n, needed: 2 });
    }
    let (center, scale) = match channel {
        Channel::Eeg => {
            let med = median_of(samples.to_vec());
            let mad = median_of(samples.iter().map(|x| (x - med).abs()).collect());
            (med, 1.4826 * mad)
        }
        Channel::Eog | Channel::Pulse => {
            let mean = samples.iter().sum::<f64>() / n as f64;
            let var =
                samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
            (mean, var.sqrt())
        }
    };
    let limit = cfg.clip_sigma * scale;

    let clipped_mask: Vec<bool> = if limit > 0.0 {
        samples.iter().map(|x| (x - center).abs() > limit).collect()
    } else {
        alloc::vec![false; n]
    };
    let clipped = clipped_mask.iter().filter(|&&c| c).count();
    let fraction = clipped as f64 / n as f64;
    if fraction > cfg.max_clip_fraction {
        return Err(PhysioError::WindowDiscarded { channel, clipped_fraction: fraction });
    }

    let cleaned = interpolate_clipped(samples, &clipped_mask);
    let filtered = bandpass(&cleaned, fs, &cfg.filter)?;
    let (normalized, stats) = zscore(&filtered)?;
    Ok(Conditioned { normalized, stats, clipped, total: n })
}

fn interpolate_clipped(samples: &[f64], mask: &[bool]) -> Vec<f64> {
    let mut out = samples.to_vec();
    let n = samples.len();
    let mut i = 0;
    while i < n {
        if !mask[i] {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < n && mask[i] {
            i += 1;
        }
        let left = run_start.checked_sub(1).map(|j| out[j]);
        let right = if i < n { Some(out[i]) } else { None };
        match (left, right) {
            (Some(l), Some(r)) => {
                let steps = (i - run_start + 1) as f64;
                for (k, slot) in out[run_start..i].iter_mut().enumerate() {
                    *slot = l + (r - l) * (k + 1) as f64 / steps;
                }
            }
            (Some(l), None) => out[run_start..i].fill(l),
            (None, Some(r)) => out[run_start..i].fill(r),
            (None, None) => out[run_start..i].fill(0.0),
        }
    }
    out
}

/// Extract per-window physiological features.
///
/// Requires EEG, EOG, and PULSE coverage. Each channel runs through
/// artifact rejection, the bandpass, and z-score normalization; EOG
/// variance is `sigma^2` from the normalization stats (the filtered
/// signal's variance). Quality is the clean-sample fraction across all
/// channels.
pub fn physio_features(window: &Window<'_>, cfg: &PhysioConfig) -> Result<PhysioFeatures, PhysioError> {
    let mut clipped = 0usize;
    let mut total = 0usize;

    let eeg = channel_signal(window, Channel::Eeg)?;
    let eog = channel_signal(window, Channel::Eog)?;
    let pulse = channel_signal(window, Channel::Pulse)?;

    let eeg_c = condition(Channel::Eeg, &eeg.0, eeg.1, cfg)?;
    let eog_c = condition(Channel::Eog, &eog.0, eog.1, cfg)?;
    let pulse_c = condition(Channel::Pulse, &pulse.0, pulse.1, cfg)?;
    for c in [&eeg_c, &eog_c, &pulse_c] {
        clipped += c.clipped;
        total += c.total;
    }

    let bands = band_powers_with(&eeg_c.normalized, eeg.1, cfg.welch_segment_s)?;
    let rr = detect_pulse_peaks_with(
        &pulse_c.normalized,
        pulse.1,
        cfg.peak_threshold_sigmas,
        cfg.peak_refractory_ms,
    )?;
    let hrv = hrv_metrics(&rr)?;

    let zc = eog_c
        .normalized
        .windows(2)
        .filter(|p| (p[0] < 0.0) != (p[1] < 0.0))
        .count();
    let eog_seconds = eog_c.normalized.len() as f64 / eog.1;

    Ok(PhysioFeatures {
        bands,
        theta_alpha_over_beta: bands.theta_alpha_over_beta(),
        hrv,
        eog_variance: eog_c.stats.sigma * eog_c.stats.sigma,
        eog_zero_crossing_rate: zc as f64 / eog_seconds,
        quality: 1.0 - clipped as f64 / total as f64,
    })
}

fn channel_signal(window: &Window<'_>, channel: Channel) -> Result<(Vec<f64>, f64), PhysioError> {
    let slice = window
        .channel(channel)
        .filter(|c| !c.is_empty())
        .ok_or(PhysioError::MissingChannel(channel))?;
    Ok((slice.concat(), slice.fs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    #[test]
    fn zscore_hand_example() {
        let (out, stats) = zscore(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(out, vec![-1.0, 0.0, 1.0]);
        assert_eq!(stats.mu, 2.0);
        assert_eq!(stats.sigma, 1.0);
    }

    #[test]
    fn zscore_constant_signal_errors() {
        assert_eq!(zscore(&[5.0, 5.0, 5.0]), Err(PhysioError::ZeroVariance));
    }

    #[test]
    fn bandpass_zero_signal() {
        let out = bandpass(&[0.0; 1024], 256.0, &FilterSpec::default()).unwrap();
        assert_eq!(out.len(), 1024);
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bandpass_rejects_bad_band() {
        let err = bandpass(&[0.0; 64], 256.0, &FilterSpec { lo_hz: 0.5, hi_hz: 200.0, order: 4 });
        assert!(matches!(err, Err(PhysioError::BandOutOfRange { .. })));
    }

    #[test]
    fn bandpass_rejects_short_signal() {
        let err = bandpass(&[0.0; 5], 256.0, &FilterSpec::default());
        assert!(matches!(err, Err(PhysioError::SignalTooShort { .. })));
    }

    #[test]
    fn band_powers_zero_signal() {
        let bp = band_powers(&[0.0; 1024], 256.0).unwrap();
        assert_eq!(bp.total(), 0.0);
    }

    #[test]
    fn pulse_train_at_60_bpm() {
        let fs = 256.0;
        let n = (fs * 10.0) as usize;
        let signal: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / fs;
                let phase = t - t.floor(); // beat each second
                (-0.5 * ((phase - 0.5) / 0.03).powi(2)).exp()
            })
            .collect();
        let rr = detect_pulse_peaks(&signal, fs).unwrap();
        let period_ms = 1000.0 / fs;
        for r in rr {
            assert!((r - 1000.0).abs() <= period_ms + 1e-9, "rr {r}");
        }
    }

    #[test]
    fn flat_signal_has_no_peaks() {
        assert_eq!(
            detect_pulse_peaks(&vec![1.0; 1024], 256.0),
            Err(PhysioError::InsufficientPeaks)
        );
    }

    #[test]
    fn hrv_constant_intervals() {
        let m = hrv_metrics(&[1000.0, 1000.0, 1000.0]).unwrap();
        assert_eq!(m.mean_rr_ms, 1000.0);
        assert_eq!(m.sdnn_ms, 0.0);
        assert_eq!(m.rmssd_ms, 0.0);
    }

    #[test]
    fn hrv_alternating_rmssd() {
        let m = hrv_metrics(&[800.0, 1200.0, 800.0, 1200.0]).unwrap();
        assert!((m.rmssd_ms - 400.0).abs() < 1e-9);
    }

    #[test]
    fn hrv_too_few_intervals() {
        assert_eq!(hrv_metrics(&[1000.0]), Err(PhysioError::TooFewIntervals));
    }

    #[test]
    fn interpolation_bridges_runs() {
        let samples = [0.0, 10.0, 10.0, 4.0];
        let mask = [false, true, true, false];
        let out = interpolate_clipped(&samples, &mask);
        assert!((out[1] - 4.0 / 3.0).abs() < 1e-12);
        assert!((out[2] - 8.0 / 3.0).abs() < 1e-12);
    }

    fn sine_session(amp_clip: Option<f64>) -> crate::session::Session {
        let mut s = crate::session::testutil::toy_session(10.0, 30.0, 256.0);
        for ch in Channel::ALL {
            let blocks = s.physio.get_mut(&ch).unwrap();
            for (i, v) in blocks[0].samples.iter_mut().enumerate() {
                let t = i as f64 / 256.0;
                *v = match ch {
                    Channel::Eeg => (2.0 * PI * 10.0 * t).sin() + 0.1 * (2.0 * PI * 3.0 * t).sin(),
                    Channel::Eog => (2.0 * PI * 1.0 * t).sin(),
                    Channel::Pulse => (-0.5 * ((t - t.floor() - 0.5) / 0.03).powi(2)).exp(),
                };
            }
            if let Some(clip) = amp_clip {
                let n = blocks[0].samples.len();
                // clip 30% of the EEG samples
                if ch == Channel::Eeg {
                    for v in blocks[0].samples.iter_mut().take(3 * n / 10) {
                        *v = clip;
                    }
                }
            }
        }
        s
    }

    #[test]
    fn physio_features_clean_window_quality_one() {
        let s = sine_session(None);
        let windows = crate::session::window_session(&s, 10.0, 10.0).unwrap();
        let f = physio_features(&windows[0], &PhysioConfig::default()).unwrap();
        assert_eq!(f.quality, 1.0);
        assert!(f.bands.alpha > f.bands.beta);
        assert!(f.hrv.mean_rr_ms > 900.0 && f.hrv.mean_rr_ms < 1100.0);
    }

    #[test]
    fn physio_features_excess_clipping_discards() {
        let s = sine_session(Some(50.0));
        let windows = crate::session::window_session(&s, 10.0, 10.0).unwrap();
        let err = physio_features(&windows[0], &PhysioConfig::default()).unwrap_err();
        assert!(matches!(err, PhysioError::WindowDiscarded { channel: Channel::Eeg, .. }));
    }

    #[test]
    fn physio_features_missing_channel_errors() {
        let mut s = sine_session(None);
        s.physio.remove(&Channel::Pulse);
        let windows = crate::session::window_session(&s, 10.0, 10.0).unwrap();
        let err = physio_features(&windows[0], &PhysioConfig::default()).unwrap_err();
        assert_eq!(err, PhysioError::MissingChannel(Channel::Pulse));
    }
}
