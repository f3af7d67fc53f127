//! Seeded generator of labeled synthetic sessions with separable
//! alert/drowsy statistics.
//!
//! A hidden two-state Markov chain over 1 s steps drives every emission:
//! landmark frames whose eye geometry reproduces the intended EAR
//! exactly, EEG as a sum of band-limited sinusoid mixtures
//! with state-dependent gains, EOG as blink-locked deflections, and PULSE
//! as a Gaussian-bump beat train with state-dependent RR. Labels are the
//! hidden state path.
//!
//! Determinism: all draws come from fixed sub-streams of the session
//! seed (see [`crate::rng`]); identical `(seed, params)` produce
//! identical sessions. Dataset session seeds are literally
//! `seed + index`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::rng::{child_seed, Rng};
use crate::session::{
    Channel, LandmarkFrame, PhysioBlock, Session, State, SyncMarker, Timestamp,
};

/// Per-state emission parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StateEmission {
    pub blink_rate_per_min: f64,
    /// Blink closure duration range, ms.
    pub blink_dur_ms: (f64, f64),
    pub ear_baseline: f64,
    pub ear_noise_sigma: f64,
    pub microsleep_rate_per_min: f64,
    pub microsleep_dur_s: (f64, f64),
    pub yawn_rate_per_min: f64,
    pub yawn_dur_s: (f64, f64),
    /// Band gains for delta/theta/alpha/beta sinusoid mixtures.
    pub eeg_band_gains: [f64; 4],
    pub rr_mean_ms: f64,
    pub rr_jitter_ms: f64,
    pub eog_blink_amplitude: f64,
}

/// Generator parameters: 2-state Markov chain plus emission models.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GenParams {
    pub fps: f64,
    pub fs: f64,
    /// Per-second transition probabilities.
    pub p_alert_to_drowsy: f64,
    pub p_drowsy_to_alert: f64,
    pub alert: StateEmission,
    pub drowsy: StateEmission,
    /// Stationary std of the slow EAR-baseline drift.
    pub ear_drift_sigma: f64,
    pub mar_baseline: f64,
    pub mar_yawn: f64,
    pub mar_noise_sigma: f64,
    pub eeg_noise_sigma: f64,
    /// Relative stationary std of slow per-band gain drift.
    pub eeg_gain_drift_sigma: f64,
    pub rr_drift_sigma_ms: f64,
    pub eog_noise_sigma: f64,
    pub pulse_noise_sigma: f64,
    /// Probability a frame loses its landmarks (`valid = false`).
    pub landmark_dropout_prob: f64,
    /// Per-sample probability of a rail artifact on each channel.
    pub clip_prob: f64,
    /// Rail value of clipped samples.
    pub clip_value: f64,
    /// Relative jitter applied to per-subject emission means.
    pub subject_jitter: f64,
    /// Physio block chunk length, seconds.
    pub block_s: f64,
    pub sync_marker_interval_s: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            fps: 30.0,
            fs: 256.0,
            p_alert_to_drowsy: 0.01,
            p_drowsy_to_alert: 0.01,
            alert: StateEmission {
                blink_rate_per_min: 15.0,
                blink_dur_ms: (100.0, 150.0),
                ear_baseline: 0.32,
                ear_noise_sigma: 0.055,
                microsleep_rate_per_min: 0.0,
                microsleep_dur_s: (1.0, 2.0),
                yawn_rate_per_min: 0.05,
                yawn_dur_s: (3.0, 5.0),
                eeg_band_gains: [1.0, 0.6, 0.7, 1.0],
                rr_mean_ms: 850.0,
                rr_jitter_ms: 30.0,
                eog_blink_amplitude: 1.5,
            },
            drowsy: StateEmission {
                blink_rate_per_min: 8.0,
                blink_dur_ms: (300.0, 500.0),
                ear_baseline: 0.28,
                ear_noise_sigma: 0.065,
                microsleep_rate_per_min: 0.5,
                microsleep_dur_s: (1.0, 2.0),
                yawn_rate_per_min: 0.5,
                yawn_dur_s: (4.0, 6.0),
                eeg_band_gains: [1.0, 1.2, 1.4, 0.7],
                rr_mean_ms: 1000.0,
                rr_jitter_ms: 45.0,
                eog_blink_amplitude: 1.2,
            },
            ear_drift_sigma: 0.025,
            mar_baseline: 0.25,
            mar_yawn: 0.8,
            mar_noise_sigma: 0.04,
            eeg_noise_sigma: 0.5,
            eeg_gain_drift_sigma: 0.2,
            rr_drift_sigma_ms: 40.0,
            eog_noise_sigma: 0.4,
            pulse_noise_sigma: 0.05,
            landmark_dropout_prob: 0.02,
            clip_prob: 0.01,
            clip_value: 8.0,
            subject_jitter: 0.10,
            block_s: 10.0,
            sync_marker_interval_s: 30.0,
        }
    }
}

impl GenParams {
    fn emission(&self, state: State) -> &StateEmission {
        match state {
            State::Alert => &self.alert,
            State::Drowsy => &self.drowsy,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let probs = [
            self.p_alert_to_drowsy,
            self.p_drowsy_to_alert,
            self.landmark_dropout_prob,
            self.clip_prob,
        ];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(SynthError::InvalidParams("probabilities must be in [0, 1]"));
        }
        if !(self.fps > 0.0 && self.fs > 0.0 && self.block_s > 0.0) {
            return Err(SynthError::InvalidParams("rates must be positive"));
        }
        for e in [&self.alert, &self.drowsy] {
            if e.blink_rate_per_min < 0.0
                || e.blink_dur_ms.0 <= 0.0
                || e.blink_dur_ms.1 < e.blink_dur_ms.0
                || e.ear_baseline <= 0.0
                || e.rr_mean_ms <= 0.0
                || e.rr_jitter_ms < 0.0
                || e.eeg_band_gains.iter().any(|g| *g < 0.0)
            {
                return Err(SynthError::InvalidParams("emission parameters out of range"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthError {
    InvalidParams(&'static str),
    DurationTooShort,
    InvalidCounts { n_sessions: usize, n_subjects: usize },
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::InvalidParams(msg) => write!(f, "invalid generator params: {msg}"),
            SynthError::DurationTooShort => write!(f, "duration_s must be >= 120"),
            SynthError::InvalidCounts { n_sessions, n_subjects } => {
                write!(f, "need n_sessions >= n_subjects >= 1, got {n_sessions}/{n_subjects}")
            }
        }
    }
}

impl core::error::Error for SynthError {}

/// Ground truth retained for oracle tests.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionTruth {
    /// Hidden state per 1 s step.
    pub state_path: Vec<State>,
    /// Pulse beat instants, seconds.
    pub beat_times_s: Vec<f64>,
    /// EAR the eye geometry encodes, per frame, before dropout.
    pub intended_ear: Vec<f64>,
    /// Eye-closure intervals (blinks and microsleeps), seconds.
    pub closed_intervals: Vec<(f64, f64)>,
    pub yawn_intervals: Vec<(f64, f64)>,
}

// Sub-stream indices of the session seed.
const STREAM_STATE: u64 = 0;
const STREAM_EYE_EVENTS: u64 = 1;
const STREAM_YAWN: u64 = 2;
const STREAM_EEG: u64 = 3;
const STREAM_EOG: u64 = 4;
const STREAM_PULSE: u64 = 5;
const STREAM_DROPOUT: u64 = 6;
const STREAM_CLIP: u64 = 7;
const STREAM_EAR_DRIFT: u64 = 8;
const STREAM_GAIN_DRIFT: u64 = 9;
const STREAM_RR_DRIFT: u64 = 10;
const STREAM_FRAME_NOISE: u64 = 11;
const STREAM_MAR_NOISE: u64 = 12;
const SUBJECT_STREAM_BASE: u64 = 20_000;

const EAR_CLOSED: f64 = 0.06;
const EEG_COMPONENTS_PER_BAND: usize = 8;
const PULSE_BUMP_SIGMA_S: f64 = 0.03;

/// Generate one labeled session. `duration_s` must be at least 120.
pub fn generate_session(
    seed: u64,
    duration_s: f64,
    params: &GenParams,
) -> Result<Session, SynthError> {
    generate_session_with_truth(seed, duration_s, params).map(|(s, _)| s)
}

/// Like [`generate_session`], also returning the hidden ground truth.
pub fn generate_session_with_truth(
    seed: u64,
    duration_s: f64,
    params: &GenParams,
) -> Result<(Session, SessionTruth), SynthError> {
    params.validate()?;
    if duration_s < 120.0 {
        return Err(SynthError::DurationTooShort);
    }

    let seconds = duration_s.ceil() as usize;
    let state_path = sample_state_path(seed, seconds, params);
    let ear_drift = ou_path(
        Rng::for_stream(seed, STREAM_EAR_DRIFT),
        seconds,
        params.ear_drift_sigma,
    );
    let rr_drift = ou_path(
        Rng::for_stream(seed, STREAM_RR_DRIFT),
        seconds,
        params.rr_drift_sigma_ms,
    );
    let gain_drift: Vec<Vec<f64>> = {
        let mut rng = Rng::for_stream(seed, STREAM_GAIN_DRIFT);
        (0..4)
            .map(|_| ou_path_with(&mut rng, seconds, params.eeg_gain_drift_sigma))
            .collect()
    };

    let (closed_intervals, eog_deflections) = sample_eye_events(seed, seconds, &state_path, params);
    let yawn_intervals = sample_yawns(seed, seconds, &state_path, params);

    let (frames, intended_ear) = emit_frames(
        seed,
        duration_s,
        &state_path,
        &ear_drift,
        &closed_intervals,
        &yawn_intervals,
        params,
    );

    let n_samples = (duration_s * params.fs).round() as usize;
    let eeg = emit_eeg(seed, n_samples, &state_path, &gain_drift, params);
    let eog = emit_eog(seed, n_samples, &eog_deflections, params);
    let (pulse, beat_times_s) = emit_pulse(seed, n_samples, &state_path, &rr_drift, params);

    let mut channels = BTreeMap::new();
    let mut clip_rng = Rng::for_stream(seed, STREAM_CLIP);
    for (channel, mut samples) in [
        (Channel::Eeg, eeg),
        (Channel::Eog, eog),
        (Channel::Pulse, pulse),
    ] {
        for v in &mut samples {
            if clip_rng.bernoulli(params.clip_prob) {
                *v = if clip_rng.bernoulli(0.5) { params.clip_value } else { -params.clip_value };
            }
        }
        channels.insert(channel, chunk_blocks(channel, &samples, params));
    }

    let labels = change_point_labels(&state_path);
    let sync_markers = {
        let mut markers = Vec::new();
        let mut t = 0.0;
        while t < duration_s {
            let us = (t * 1e6).round() as i64;
            markers.push(SyncMarker { video_us: us, physio_us: us });
            t += params.sync_marker_interval_s;
        }
        markers
    };

    let session = Session {
        id: format!("sess-{seed:08x}"),
        subject_id: String::from("subj-000"),
        fps: params.fps,
        frames,
        physio: channels,
        labels,
        sync_markers,
    };
    let truth = SessionTruth {
        state_path,
        beat_times_s,
        intended_ear,
        closed_intervals,
        yawn_intervals,
    };
    Ok((session, truth))
}

fn sample_state_path(seed: u64, seconds: usize, params: &GenParams) -> Vec<State> {
    let mut rng = Rng::for_stream(seed, STREAM_STATE);
    let stationary_drowsy =
        params.p_alert_to_drowsy / (params.p_alert_to_drowsy + params.p_drowsy_to_alert).max(1e-12);
    let mut state = if rng.bernoulli(stationary_drowsy) {
        State::Drowsy
    } else {
        State::Alert
    };
    let mut path = Vec::with_capacity(seconds);
    for _ in 0..seconds {
        path.push(state);
        let flip = match state {
            State::Alert => params.p_alert_to_drowsy,
            State::Drowsy => params.p_drowsy_to_alert,
        };
        if rng.bernoulli(flip) {
            state = match state {
                State::Alert => State::Drowsy,
                State::Drowsy => State::Alert,
            };
        }
    }
    path
}

/// AR(1) path with the given stationary std, one step per second.
fn ou_path(mut rng: Rng, seconds: usize, sigma: f64) -> Vec<f64> {
    ou_path_with(&mut rng, seconds, sigma)
}

fn ou_path_with(rng: &mut Rng, seconds: usize, sigma: f64) -> Vec<f64> {
    let rho: f64 = 0.98;
    let step = sigma * (1.0 - rho * rho).sqrt();
    let mut value = sigma * rng.next_gaussian();
    let mut path = Vec::with_capacity(seconds);
    for _ in 0..seconds {
        path.push(value);
        value = rho * value + step * rng.next_gaussian();
    }
    path
}

/// Closure events (blinks + microsleeps) and the EOG deflection list
/// `(start_s, duration_s, amplitude)`.
#[allow(clippy::type_complexity)]
fn sample_eye_events(
    seed: u64,
    seconds: usize,
    path: &[State],
    params: &GenParams,
) -> (Vec<(f64, f64)>, Vec<(f64, f64, f64)>) {
    let mut rng = Rng::for_stream(seed, STREAM_EYE_EVENTS);
    let mut closed = Vec::new();
    let mut deflections = Vec::new();
    for (sec, &state) in path.iter().enumerate().take(seconds) {
        let e = params.emission(state);
        if rng.bernoulli(e.blink_rate_per_min / 60.0) {
            let start = sec as f64 + rng.next_f64();
            let dur = rng.range_f64(e.blink_dur_ms.0, e.blink_dur_ms.1) / 1000.0;
            let amp = e.eog_blink_amplitude * (1.0 + 0.1 * rng.next_gaussian());
            closed.push((start, start + dur));
            deflections.push((start, dur + 0.2, amp));
        }
        if e.microsleep_rate_per_min > 0.0 && rng.bernoulli(e.microsleep_rate_per_min / 60.0) {
            let start = sec as f64 + rng.next_f64();
            let dur = rng.range_f64(e.microsleep_dur_s.0, e.microsleep_dur_s.1);
            closed.push((start, start + dur));
        }
    }
    closed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
    (closed, deflections)
}

fn sample_yawns(seed: u64, seconds: usize, path: &[State], params: &GenParams) -> Vec<(f64, f64)> {
    let mut rng = Rng::for_stream(seed, STREAM_YAWN);
    let mut yawns: Vec<(f64, f64)> = Vec::new();
    for (sec, &state) in path.iter().enumerate().take(seconds) {
        let e = params.emission(state);
        if rng.bernoulli(e.yawn_rate_per_min / 60.0) {
            let start = sec as f64 + rng.next_f64();
            let dur = rng.range_f64(e.yawn_dur_s.0, e.yawn_dur_s.1);
            // merge overlaps so runs stay maximal
            if let Some(last) = yawns.last_mut() {
                if start <= last.1 {
                    last.1 = last.1.max(start + dur);
                    continue;
                }
            }
            yawns.push((start, start + dur));
        }
    }
    yawns
}

fn in_intervals(intervals: &[(f64, f64)], t: f64) -> bool {
    intervals.iter().any(|&(a, b)| t >= a && t < b)
}

fn emit_frames(
    seed: u64,
    duration_s: f64,
    path: &[State],
    ear_drift: &[f64],
    closed: &[(f64, f64)],
    yawns: &[(f64, f64)],
    params: &GenParams,
) -> (Vec<LandmarkFrame>, Vec<f64>) {
    let mut noise_rng = Rng::for_stream(seed, STREAM_FRAME_NOISE);
    let mut mar_rng = Rng::for_stream(seed, STREAM_MAR_NOISE);
    let mut dropout_rng = Rng::for_stream(seed, STREAM_DROPOUT);

    let n_frames = (duration_s * params.fps).round() as usize;
    let mut frames = Vec::with_capacity(n_frames);
    let mut intended = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let t = i as f64 / params.fps;
        let sec = (t as usize).min(path.len() - 1);
        let e = params.emission(path[sec]);
        let noise = noise_rng.next_gaussian();
        let ear = if in_intervals(closed, t) {
            (EAR_CLOSED + 0.01 * noise).max(0.02)
        } else {
            (e.ear_baseline + ear_drift[sec] + e.ear_noise_sigma * noise).clamp(0.02, 0.6)
        };
        let mar_noise = mar_rng.next_gaussian();
        let mar = if in_intervals(yawns, t) {
            (params.mar_yawn + params.mar_noise_sigma * mar_noise).max(0.05)
        } else {
            (params.mar_baseline + params.mar_noise_sigma * mar_noise).max(0.05)
        };
        let valid = !dropout_rng.bernoulli(params.landmark_dropout_prob);
        frames.push(LandmarkFrame {
            t: Timestamp((i as f64 * 1e6 / params.fps).round() as i64),
            left_eye: eye_points(300.0, 240.0, 40.0, ear),
            right_eye: eye_points(360.0, 240.0, 40.0, ear),
            mouth: mouth_points(330.0, 300.0, 60.0, mar),
            valid,
        });
        intended.push(ear);
    }
    (frames, intended)
}

/// Eye geometry whose EAR is exactly the requested value: corners at
/// `cx +- w/2`, upper/lower pairs offset vertically by `ear * w / 2`.
fn eye_points(cx: f64, cy: f64, w: f64, ear: f64) -> [[f64; 2]; 6] {
    let v = ear * w / 2.0;
    [
        [cx - w / 2.0, cy],
        [cx - w / 6.0, cy - v],
        [cx + w / 6.0, cy - v],
        [cx + w / 2.0, cy],
        [cx + w / 6.0, cy + v],
        [cx - w / 6.0, cy + v],
    ]
}

/// Mouth geometry encoding the requested MAR.
fn mouth_points(cx: f64, cy: f64, w: f64, mar: f64) -> [[f64; 2]; 8] {
    let h = mar * w / 2.0;
    [
        [cx - w / 2.0, cy],
        [cx - w / 4.0, cy - h],
        [cx, cy - h],
        [cx + w / 4.0, cy - h],
        [cx + w / 2.0, cy],
        [cx + w / 4.0, cy + h],
        [cx, cy + h],
        [cx - w / 4.0, cy + h],
    ]
}

fn emit_eeg(
    seed: u64,
    n_samples: usize,
    path: &[State],
    gain_drift: &[Vec<f64>],
    params: &GenParams,
) -> Vec<f64> {
    use crate::physio::BAND_EDGES;
    let mut rng = Rng::for_stream(seed, STREAM_EEG);
    // fixed per-session component frequencies and phases per band
    let amp = 1.0 / (EEG_COMPONENTS_PER_BAND as f64).sqrt();
    let components: Vec<Vec<(f64, f64)>> = BAND_EDGES
        .iter()
        .map(|&(lo, hi)| {
            (0..EEG_COMPONENTS_PER_BAND)
                .map(|_| {
                    (
                        rng.range_f64(lo, hi),
                        rng.range_f64(0.0, 2.0 * core::f64::consts::PI),
                    )
                })
                .collect()
        })
        .collect();

    let two_pi = 2.0 * core::f64::consts::PI;
    let mut out = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let t = i as f64 / params.fs;
        let sec = (t as usize).min(path.len() - 1);
        let gains = params.emission(path[sec]).eeg_band_gains;
        let mut x = 0.0;
        for (b, comps) in components.iter().enumerate() {
            let gain = gains[b] * (1.0 + gain_drift[b][sec]).max(0.2);
            let mut band = 0.0;
            for &(f, phase) in comps {
                band += (two_pi * f * t + phase).sin();
            }
            x += gain * amp * band;
        }
        out.push(x + params.eeg_noise_sigma * rng.next_gaussian());
    }
    out
}

fn emit_eog(
    seed: u64,
    n_samples: usize,
    deflections: &[(f64, f64, f64)],
    params: &GenParams,
) -> Vec<f64> {
    let mut rng = Rng::for_stream(seed, STREAM_EOG);
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut out = Vec::with_capacity(n_samples);
    let mut cursor = 0usize;
    for i in 0..n_samples {
        let t = i as f64 / params.fs;
        while cursor < deflections.len() && deflections[cursor].0 + deflections[cursor].1 < t {
            cursor += 1;
        }
        let mut x = 0.0;
        for &(start, dur, amp) in deflections[cursor..].iter() {
            if start > t {
                break;
            }
            let tau = (t - start) / dur;
            if (0.0..1.0).contains(&tau) {
                // biphasic deflection
                x += amp * (two_pi * tau).sin();
            }
        }
        out.push(x + params.eog_noise_sigma * rng.next_gaussian());
    }
    out
}

fn emit_pulse(
    seed: u64,
    n_samples: usize,
    path: &[State],
    rr_drift: &[f64],
    params: &GenParams,
) -> (Vec<f64>, Vec<f64>) {
    let mut rng = Rng::for_stream(seed, STREAM_PULSE);
    let duration_s = n_samples as f64 / params.fs;

    let mut beats = Vec::new();
    let mut amps = Vec::new();
    let mut t = 0.3 + 0.4 * rng.next_f64();
    while t < duration_s {
        beats.push(t);
        amps.push(1.0 + 0.05 * rng.next_gaussian());
        let sec = (t as usize).min(path.len() - 1);
        let e = params.emission(path[sec]);
        let rr = (e.rr_mean_ms + rr_drift[sec] + e.rr_jitter_ms * rng.next_gaussian())
            .clamp(400.0, 2000.0);
        t += rr / 1000.0;
    }

    let reach = 4.0 * PULSE_BUMP_SIGMA_S;
    let mut out = Vec::with_capacity(n_samples);
    let mut lo = 0usize;
    for i in 0..n_samples {
        let t = i as f64 / params.fs;
        while lo < beats.len() && beats[lo] < t - reach {
            lo += 1;
        }
        let mut x = 0.0;
        for (tb, a) in beats[lo..].iter().zip(&amps[lo..]) {
            if *tb > t + reach {
                break;
            }
            let d = (t - tb) / PULSE_BUMP_SIGMA_S;
            x += a * (-0.5 * d * d).exp();
        }
        out.push(x + params.pulse_noise_sigma * rng.next_gaussian());
    }
    (out, beats)
}

fn chunk_blocks(channel: Channel, samples: &[f64], params: &GenParams) -> Vec<PhysioBlock> {
    let block_len = (params.block_s * params.fs).round() as usize;
    let mut blocks = Vec::new();
    let mut start = 0usize;
    while start < samples.len() {
        let end = (start + block_len).min(samples.len());
        blocks.push(PhysioBlock {
            channel,
            fs: params.fs,
            t0: Timestamp((start as f64 / params.fs * 1e6).round() as i64),
            samples: samples[start..end].to_vec(),
        });
        start = end;
    }
    blocks
}

fn change_point_labels(path: &[State]) -> Vec<(Timestamp, State)> {
    let mut labels = Vec::new();
    for (sec, &s) in path.iter().enumerate() {
        if sec == 0 || path[sec - 1] != s {
            labels.push((Timestamp((sec as f64 * 1e6) as i64), s));
        }
    }
    labels
}

/// Generate a dataset of sessions assigned round-robin to subjects,
/// with per-subject jitter on emission means.
///
/// Session `i` uses seed `seed + i` and subject `i % n_subjects`.
/// Subject `j` draws five jitter factors (EAR baselines, blink rates,
/// EEG gains, mean RR, EOG amplitude — in that order) uniform in
/// `1 +- subject_jitter` from sub-stream `20_000 + j` of `seed`; each
/// factor scales both states' means.
pub fn generate_dataset(
    seed: u64,
    n_sessions: usize,
    n_subjects: usize,
    params: &GenParams,
) -> Result<Vec<Session>, SynthError> {
    if n_subjects == 0 || n_sessions < n_subjects {
        return Err(SynthError::InvalidCounts { n_sessions, n_subjects });
    }
    generate_dataset_with(seed, n_sessions, n_subjects, 300.0, params)
}

pub fn generate_dataset_with(
    seed: u64,
    n_sessions: usize,
    n_subjects: usize,
    duration_s: f64,
    params: &GenParams,
) -> Result<Vec<Session>, SynthError> {
    if n_subjects == 0 || n_sessions < n_subjects {
        return Err(SynthError::InvalidCounts { n_sessions, n_subjects });
    }
    params.validate()?;

    let subject_params: Vec<GenParams> = (0..n_subjects)
        .map(|j| jitter_params(params, seed, j as u64))
        .collect();

    let mut sessions = Vec::with_capacity(n_sessions);
    for i in 0..n_sessions {
        let subject = i % n_subjects;
        let session_seed = seed.wrapping_add(i as u64);
        let mut s = generate_session(session_seed, duration_s, &subject_params[subject])?;
        s.id = format!("sess-{i:04}");
        s.subject_id = format!("subj-{subject:03}");
        sessions.push(s);
    }
    Ok(sessions)
}

fn jitter_params(base: &GenParams, seed: u64, subject: u64) -> GenParams {
    let mut rng = Rng::new(child_seed(seed, SUBJECT_STREAM_BASE + subject));
    let mut factor = || 1.0 + base.subject_jitter * (2.0 * rng.next_f64() - 1.0);
    let (f_ear, f_blink, f_eeg, f_rr, f_eog) = (factor(), factor(), factor(), factor(), factor());

    let mut params = base.clone();
    for e in [&mut params.alert, &mut params.drowsy] {
        e.ear_baseline *= f_ear;
        e.blink_rate_per_min *= f_blink;
        for g in &mut e.eeg_band_gains {
            *g *= f_eeg;
        }
        e.rr_mean_ms *= f_rr;
        e.eog_blink_amplitude *= f_eog;
    }
    params
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vision::{ear, EyeLandmarks};

    #[test]
    fn same_seed_identical_sessions() {
        let params = GenParams::default();
        let a = generate_session(7, 120.0, &params).unwrap();
        let b = generate_session(7, 120.0, &params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn emitted_counts_match_rates() {
        let params = GenParams::default();
        let s = generate_session(1, 120.0, &params).unwrap();
        assert_eq!(s.frames.len(), 3600);
        for ch in Channel::ALL {
            let total: usize = s.blocks(ch).iter().map(|b| b.samples.len()).sum();
            assert_eq!(total, 30720, "channel {ch}");
        }
        assert!((s.duration_secs() - 120.0).abs() < 1e-9);
        s.validate().unwrap();
    }

    #[test]
    fn eye_geometry_encodes_intended_ear() {
        let params = GenParams {
            landmark_dropout_prob: 0.0,
            ..GenParams::default()
        };
        let (s, truth) = generate_session_with_truth(3, 120.0, &params).unwrap();
        for (fr, &want) in s.frames.iter().zip(&truth.intended_ear).step_by(37) {
            let left = ear(&EyeLandmarks::new(fr.left_eye)).unwrap();
            let right = ear(&EyeLandmarks::new(fr.right_eye)).unwrap();
            assert!((left - want).abs() < 1e-6, "left {left} vs {want}");
            assert!((right - want).abs() < 1e-6);
        }
    }

    #[test]
    fn labels_match_state_path() {
        let params = GenParams::default();
        let (s, truth) = generate_session_with_truth(11, 180.0, &params).unwrap();
        for (sec, &state) in truth.state_path.iter().enumerate() {
            assert_eq!(s.state_at(sec as f64 + 0.5), state, "second {sec}");
        }
    }

    #[test]
    fn duration_precondition_enforced() {
        let params = GenParams::default();
        assert_eq!(
            generate_session(1, 60.0, &params),
            Err(SynthError::DurationTooShort)
        );
    }

    #[test]
    fn dataset_round_robin_subjects() {
        let params = GenParams::default();
        let sessions = generate_dataset_with(5, 10, 5, 120.0, &params).unwrap();
        assert_eq!(sessions.len(), 10);
        for j in 0..5 {
            let count = sessions
                .iter()
                .filter(|s| s.subject_id == format!("subj-{j:03}"))
                .count();
            assert_eq!(count, 2);
        }
    }

    #[test]
    fn dataset_sessions_distinct() {
        let params = GenParams::default();
        let sessions = generate_dataset_with(5, 4, 2, 120.0, &params).unwrap();
        for i in 0..sessions.len() {
            for j in i + 1..sessions.len() {
                assert_ne!(sessions[i].frames, sessions[j].frames, "{i} vs {j}");
            }
        }
    }

    #[test]
    fn dataset_invalid_counts() {
        let params = GenParams::default();
        assert!(matches!(
            generate_dataset(1, 3, 5, &params),
            Err(SynthError::InvalidCounts { .. })
        ));
    }
}
