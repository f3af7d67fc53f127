//! Session data model, cross-stream time alignment, and windowing.
//!
//! A [`Session`] bundles one recording: landmark frames at a nominal video
//! rate, per-channel physiological sample blocks, ground-truth state labels
//! (change points), and the sync markers used for clock alignment. All
//! timestamps are integer microseconds since session start.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

/// Microseconds since session start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub const fn from_micros(us: i64) -> Self {
        Self(us)
    }

    pub fn from_secs(s: f64) -> Self {
        Self((s * 1e6).round() as i64)
    }

    pub const fn micros(self) -> i64 {
        self.0
    }

    pub fn as_secs(self) -> f64 {
        self.0 as f64 * 1e-6
    }
}

/// Ground-truth driver state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum State {
    #[cfg_attr(feature = "serde", serde(rename = "ALERT"))]
    Alert,
    #[cfg_attr(feature = "serde", serde(rename = "DROWSY"))]
    Drowsy,
}

impl State {
    pub const fn as_str(self) -> &'static str {
        match self {
            State::Alert => "ALERT",
            State::Drowsy => "DROWSY",
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Physiological channel identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Channel {
    #[cfg_attr(feature = "serde", serde(rename = "EEG"))]
    Eeg,
    #[cfg_attr(feature = "serde", serde(rename = "EOG"))]
    Eog,
    #[cfg_attr(feature = "serde", serde(rename = "PULSE"))]
    Pulse,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Eeg, Channel::Eog, Channel::Pulse];

    pub const fn as_str(self) -> &'static str {
        match self {
            Channel::Eeg => "EEG",
            Channel::Eog => "EOG",
            Channel::Pulse => "PULSE",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One video frame of facial landmarks: 6 points per eye, 8 for the mouth.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LandmarkFrame {
    pub t: Timestamp,
    pub left_eye: [[f64; 2]; 6],
    pub right_eye: [[f64; 2]; 6],
    pub mouth: [[f64; 2]; 8],
    pub valid: bool,
}

/// A contiguous run of samples from one channel. Sample `i` is implicitly
/// at `t0 + i/fs`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhysioBlock {
    pub channel: Channel,
    pub fs: f64,
    pub t0: Timestamp,
    pub samples: Vec<f64>,
}

impl PhysioBlock {
    /// Time of sample `i`, in seconds.
    pub fn sample_time(&self, i: usize) -> f64 {
        self.t0.as_secs() + i as f64 / self.fs
    }

    /// End of coverage (one sample period past the last sample), seconds.
    pub fn end_secs(&self) -> f64 {
        self.t0.as_secs() + self.samples.len() as f64 / self.fs
    }
}

/// One sync event observed by both clocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyncMarker {
    /// Event time on the video clock, microseconds.
    pub video_us: i64,
    /// Event time on the physio clock, microseconds.
    pub physio_us: i64,
}

/// A synchronized recording: landmark stream, physio channels, labels.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Session {
    pub id: String,
    pub subject_id: String,
    /// Nominal video rate, frames per second.
    pub fps: f64,
    pub frames: Vec<LandmarkFrame>,
    pub physio: BTreeMap<Channel, Vec<PhysioBlock>>,
    /// State change points; each holds until the next entry or session end.
    pub labels: Vec<(Timestamp, State)>,
    pub sync_markers: Vec<SyncMarker>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SessionError {
    EmptyStream(&'static str),
    NonMonotoneTimestamps(&'static str),
    NonFiniteValue(&'static str),
    InvalidRate(f64),
    LabelOutOfRange(Timestamp),
    ExcessiveDrift { offset_us: i64, limit_us: i64 },
    BadTolerance(f64),
    BadWindow { window_s: f64, stride_s: f64 },
    WindowLongerThanSession { window_s: f64, duration_s: f64 },
}

impl fmt::Display for SessionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SessionError::EmptyStream(which) => write!(f, "empty stream: {which}"),
            SessionError::NonMonotoneTimestamps(which) => {
                write!(f, "non-monotone timestamps in {which}")
            }
            SessionError::NonFiniteValue(which) => write!(f, "non-finite value in {which}"),
            SessionError::InvalidRate(fs) => write!(f, "invalid sampling rate {fs}"),
            SessionError::LabelOutOfRange(t) => {
                write!(f, "label timestamp {} us outside session", t.micros())
            }
            SessionError::ExcessiveDrift { offset_us, limit_us } => write!(
                f,
                "estimated clock offset {offset_us} us exceeds {limit_us} us; capture looks corrupt"
            ),
            SessionError::BadTolerance(t) => write!(f, "tolerance_ms must be positive, got {t}"),
            SessionError::BadWindow { window_s, stride_s } => write!(
                f,
                "require 0 < stride <= window, got window {window_s} stride {stride_s}"
            ),
            SessionError::WindowLongerThanSession { window_s, duration_s } => write!(
                f,
                "window {window_s} s longer than session {duration_s} s"
            ),
        }
    }
}

impl core::error::Error for SessionError {}

impl Session {
    /// Session duration in seconds: the latest stream end across video
    /// (last frame + one frame period) and physio coverage.
    pub fn duration_secs(&self) -> f64 {
        let video_end = self
            .frames
            .last()
            .map(|fr| fr.t.as_secs() + 1.0 / self.fps)
            .unwrap_or(0.0);
        let physio_end = self
            .physio
            .values()
            .flat_map(|blocks| blocks.iter().map(|b| b.end_secs()))
            .fold(0.0, f64::max);
        video_end.max(physio_end)
    }

    pub fn blocks(&self, channel: Channel) -> &[PhysioBlock] {
        self.physio.get(&channel).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Validate every invariant the file format promises.
    pub fn validate(&self) -> Result<(), SessionError> {
        if self.frames.is_empty() {
            return Err(SessionError::EmptyStream("frames"));
        }
        if self.physio.is_empty() || self.physio.values().all(|b| b.is_empty()) {
            return Err(SessionError::EmptyStream("physio"));
        }
        if self.labels.is_empty() {
            return Err(SessionError::EmptyStream("labels"));
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(SessionError::InvalidRate(self.fps));
        }
        let mut prev = i64::MIN;
        for fr in &self.frames {
            if fr.t.micros() < prev {
                return Err(SessionError::NonMonotoneTimestamps("frames"));
            }
            prev = fr.t.micros();
            let finite = fr
                .left_eye
                .iter()
                .chain(fr.right_eye.iter())
                .chain(fr.mouth.iter())
                .all(|p| p[0].is_finite() && p[1].is_finite());
            if !finite {
                return Err(SessionError::NonFiniteValue("frame landmarks"));
            }
        }
        for blocks in self.physio.values() {
            let mut prev = i64::MIN;
            for b in blocks {
                if !(b.fs.is_finite() && b.fs > 0.0) {
                    return Err(SessionError::InvalidRate(b.fs));
                }
                if b.t0.micros() < prev {
                    return Err(SessionError::NonMonotoneTimestamps("physio blocks"));
                }
                prev = b.t0.micros();
                if b.samples.iter().any(|s| !s.is_finite()) {
                    return Err(SessionError::NonFiniteValue("physio samples"));
                }
            }
        }
        let duration = self.duration_secs();
        let mut prev = i64::MIN;
        for &(t, _) in &self.labels {
            if t.micros() < prev {
                return Err(SessionError::NonMonotoneTimestamps("labels"));
            }
            prev = t.micros();
            if t.micros() < 0 || t.as_secs() > duration {
                return Err(SessionError::LabelOutOfRange(t));
            }
        }
        Ok(())
    }

    /// Label in force at time `t_s` (seconds).
    pub fn state_at(&self, t_s: f64) -> State {
        let mut state = self.labels.first().map(|&(_, s)| s).unwrap_or(State::Alert);
        for &(t, s) in &self.labels {
            if t.as_secs() <= t_s {
                state = s;
            } else {
                break;
            }
        }
        state
    }
}

/// Smallest distance (seconds) from `t_s` to any sample of `blocks`.
fn nearest_sample_gap(blocks: &[PhysioBlock], t_s: f64) -> f64 {
    let mut best = f64::INFINITY;
    for b in blocks {
        if b.samples.is_empty() {
            continue;
        }
        let t0 = b.t0.as_secs();
        let last = t0 + (b.samples.len() - 1) as f64 / b.fs;
        let gap = if t_s <= t0 {
            t0 - t_s
        } else if t_s >= last {
            t_s - last
        } else {
            let idx = ((t_s - t0) * b.fs).round();
            (t_s - (t0 + idx / b.fs)).abs()
        };
        best = best.min(gap);
    }
    best
}

/// Correct the video clock against the physio clock and drop frames that
/// lack physio coverage.
///
/// The offset is the median of `video_us - physio_us` over the declared
/// sync markers (zero when there are none); an offset beyond 10x the
/// tolerance signals a corrupt capture. After correction a frame survives
/// only if every channel has a sample within `tolerance_ms` of it. Markers
/// are rewritten with the correction, so the operation is idempotent.
pub fn align_streams(session: &Session, tolerance_ms: f64) -> Result<Session, SessionError> {
    if !(tolerance_ms.is_finite() && tolerance_ms > 0.0) {
        return Err(SessionError::BadTolerance(tolerance_ms));
    }
    if session.frames.is_empty() {
        return Err(SessionError::EmptyStream("frames"));
    }
    if session.physio.is_empty() || session.physio.values().all(|b| b.is_empty()) {
        return Err(SessionError::EmptyStream("physio"));
    }

    let offset_us = median_offset_us(&session.sync_markers);
    let limit_us = (10.0 * tolerance_ms * 1e3) as i64;
    if offset_us.abs() > limit_us {
        return Err(SessionError::ExcessiveDrift { offset_us, limit_us });
    }

    let tol_s = tolerance_ms * 1e-3;
    let mut out = session.clone();
    out.frames.clear();
    for fr in &session.frames {
        let t_us = fr.t.micros() - offset_us;
        let t_s = t_us as f64 * 1e-6;
        let covered = session
            .physio
            .values()
            .all(|blocks| nearest_sample_gap(blocks, t_s) <= tol_s + 1e-12);
        if covered {
            let mut fr = fr.clone();
            fr.t = Timestamp(t_us);
            out.frames.push(fr);
        }
    }
    for m in &mut out.sync_markers {
        m.video_us -= offset_us;
    }
    Ok(out)
}

fn median_offset_us(markers: &[SyncMarker]) -> i64 {
    if markers.is_empty() {
        return 0;
    }
    let mut diffs: Vec<i64> = markers.iter().map(|m| m.video_us - m.physio_us).collect();
    diffs.sort_unstable();
    let n = diffs.len();
    if n % 2 == 1 {
        diffs[n / 2]
    } else {
        // floor of the midpoint, exact for even sums
        let a = diffs[n / 2 - 1];
        let b = diffs[n / 2];
        a + (b - a) / 2
    }
}

/// Samples of one channel inside a window, as borrowed segments.
#[derive(Debug, Clone)]
pub struct ChannelSlice<'a> {
    pub channel: Channel,
    pub fs: f64,
    /// `(segment start time in seconds, samples)`, in time order.
    pub segments: Vec<(f64, &'a [f64])>,
}

impl ChannelSlice<'_> {
    pub fn len(&self) -> usize {
        self.segments.iter().map(|(_, s)| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Concatenate the segments into one owned signal.
    pub fn concat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.len());
        for (_, s) in &self.segments {
            v.extend_from_slice(s);
        }
        v
    }
}

/// A fixed-length view over a session: frames, per-channel samples, and
/// the majority label.
#[derive(Debug, Clone)]
pub struct Window<'a> {
    pub start: Timestamp,
    pub duration_s: f64,
    pub frames: &'a [LandmarkFrame],
    pub physio: Vec<ChannelSlice<'a>>,
    pub label: State,
}

impl<'a> Window<'a> {
    pub fn channel(&self, channel: Channel) -> Option<&ChannelSlice<'a>> {
        self.physio.iter().find(|c| c.channel == channel)
    }
}

/// Cut a session into fixed windows at starts `0, stride, 2*stride, ...`.
///
/// The window count is `floor((duration - window) / stride) + 1`. The
/// window label is the state covering the majority of it; exact ties go
/// to `DROWSY`.
pub fn window_session(
    session: &Session,
    window_s: f64,
    stride_s: f64,
) -> Result<Vec<Window<'_>>, SessionError> {
    if !(stride_s > 0.0 && stride_s <= window_s) {
        return Err(SessionError::BadWindow { window_s, stride_s });
    }
    let duration_s = session.duration_secs();
    if window_s > duration_s + 1e-9 {
        return Err(SessionError::WindowLongerThanSession { window_s, duration_s });
    }

    let window_us = (window_s * 1e6).round() as i64;
    let stride_us = (stride_s * 1e6).round() as i64;
    let duration_us = (duration_s * 1e6).round() as i64;
    let count = ((duration_us - window_us) / stride_us + 1) as usize;

    let mut windows = Vec::with_capacity(count);
    for k in 0..count {
        windows.push(build_window(session, k as i64 * stride_us, window_s, duration_s));
    }
    Ok(windows)
}

/// Build the single window starting at `start_us`. Used by the stream
/// replay; [`window_session`] is this in a loop over the stride grid.
pub fn window_at(session: &Session, start_us: i64, window_s: f64) -> Window<'_> {
    build_window(session, start_us, window_s, session.duration_secs())
}

fn build_window<'a>(
    session: &'a Session,
    start_us: i64,
    window_s: f64,
    duration_s: f64,
) -> Window<'a> {
    let window_us = (window_s * 1e6).round() as i64;
    let end_us = start_us + window_us;
    let (start_s, end_s) = (start_us as f64 * 1e-6, end_us as f64 * 1e-6);

    let lo = session.frames.partition_point(|fr| fr.t.micros() < start_us);
    let hi = session.frames.partition_point(|fr| fr.t.micros() < end_us);
    let frames = &session.frames[lo..hi];

    let mut physio = Vec::new();
    for (&channel, blocks) in &session.physio {
        let fs = blocks.first().map(|b| b.fs).unwrap_or(0.0);
        let mut segments = Vec::new();
        for b in blocks {
            if let Some((i0, i1)) = sample_index_range(b, start_s, end_s) {
                segments.push((b.sample_time(i0), &b.samples[i0..i1]));
            }
        }
        physio.push(ChannelSlice { channel, fs, segments });
    }

    let label = majority_label(session, start_s, end_s, duration_s);
    Window {
        start: Timestamp(start_us),
        duration_s: window_s,
        frames,
        physio,
        label,
    }
}

/// Indices `[i0, i1)` of samples with time in `[start_s, end_s)`.
fn sample_index_range(b: &PhysioBlock, start_s: f64, end_s: f64) -> Option<(usize, usize)> {
    if b.samples.is_empty() {
        return None;
    }
    let t0 = b.t0.as_secs();
    // snap near-integer positions so exact boundaries are stable
    let lo = ((start_s - t0) * b.fs - 1e-9).ceil().max(0.0) as usize;
    let hi_f = ((end_s - t0) * b.fs - 1e-9).ceil();
    if hi_f <= 0.0 {
        return None;
    }
    let hi = (hi_f as usize).min(b.samples.len());
    if lo >= hi {
        None
    } else {
        Some((lo, hi))
    }
}

fn majority_label(session: &Session, start_s: f64, end_s: f64, duration_s: f64) -> State {
    let mut drowsy = 0.0;
    let mut total = 0.0;
    let labels = &session.labels;
    for (i, &(t, s)) in labels.iter().enumerate() {
        let span_start = t.as_secs();
        let span_end = labels
            .get(i + 1)
            .map(|&(t, _)| t.as_secs())
            .unwrap_or(duration_s);
        let lo = span_start.max(start_s);
        let hi = span_end.min(end_s);
        if hi > lo {
            total += hi - lo;
            if s == State::Drowsy {
                drowsy += hi - lo;
            }
        }
    }
    // tie or no overlap resolves to the safety-conservative class
    if drowsy >= total - drowsy {
        State::Drowsy
    } else {
        State::Alert
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn flat_eye() -> [[f64; 2]; 6] {
        [[0.0, 0.0], [1.0, 1.0], [3.0, 1.0], [4.0, 0.0], [3.0, -1.0], [1.0, -1.0]]
    }

    fn flat_mouth() -> [[f64; 2]; 8] {
        [
            [0.0, 0.0],
            [1.0, 1.0],
            [2.0, 1.0],
            [3.0, 1.0],
            [4.0, 0.0],
            [3.0, -1.0],
            [2.0, -1.0],
            [1.0, -1.0],
        ]
    }

    pub(crate) fn toy_session(duration_s: f64, fps: f64, fs: f64) -> Session {
        let n_frames = (duration_s * fps).round() as usize;
        let frames = (0..n_frames)
            .map(|i| LandmarkFrame {
                t: Timestamp((i as f64 * 1e6 / fps).round() as i64),
                left_eye: flat_eye(),
                right_eye: flat_eye(),
                mouth: flat_mouth(),
                valid: true,
            })
            .collect();
        let n_samples = (duration_s * fs).round() as usize;
        let mut physio = BTreeMap::new();
        for ch in Channel::ALL {
            physio.insert(
                ch,
                vec![PhysioBlock {
                    channel: ch,
                    fs,
                    t0: Timestamp(0),
                    samples: vec![0.0; n_samples],
                }],
            );
        }
        Session {
            id: "toy".to_string(),
            subject_id: "subj-0".to_string(),
            fps,
            frames,
            physio,
            labels: vec![(Timestamp(0), State::Alert)],
            sync_markers: vec![],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::toy_session;
    use super::*;
    use alloc::format;
    use alloc::vec;

    #[test]
    fn duration_of_canonical_session() {
        let s = toy_session(10.0, 30.0, 256.0);
        assert_eq!(s.frames.len(), 300);
        assert_eq!(s.blocks(Channel::Eeg)[0].samples.len(), 2560);
        assert!((s.duration_secs() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn window_count_formula() {
        let s = toy_session(120.0, 30.0, 256.0);
        let w = window_session(&s, 60.0, 5.0).unwrap();
        assert_eq!(w.len(), 13);
    }

    #[test]
    fn window_equal_to_duration_gives_one_window() {
        let s = toy_session(120.0, 30.0, 256.0);
        let w = window_session(&s, 120.0, 5.0).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].frames.len(), 3600);
        assert_eq!(w[0].channel(Channel::Eeg).unwrap().len(), 30720);
    }

    #[test]
    fn window_longer_than_session_errors() {
        let s = toy_session(120.0, 30.0, 256.0);
        let err = window_session(&s, 121.0, 5.0).unwrap_err();
        assert!(matches!(err, SessionError::WindowLongerThanSession { .. }));
    }

    #[test]
    fn half_and_half_window_labels_drowsy() {
        let mut s = toy_session(120.0, 30.0, 256.0);
        s.labels = vec![(Timestamp(0), State::Alert), (Timestamp::from_secs(60.0), State::Drowsy)];
        let w = window_session(&s, 120.0, 120.0).unwrap();
        assert_eq!(w[0].label, State::Drowsy);
    }

    #[test]
    fn majority_label_wins() {
        let mut s = toy_session(120.0, 30.0, 256.0);
        s.labels = vec![(Timestamp(0), State::Alert), (Timestamp::from_secs(90.0), State::Drowsy)];
        let w = window_session(&s, 120.0, 120.0).unwrap();
        assert_eq!(w[0].label, State::Alert);
    }

    #[test]
    fn windows_respect_session_bounds() {
        let s = toy_session(65.0, 30.0, 256.0);
        for w in window_session(&s, 60.0, 5.0).unwrap() {
            let end = w.start.as_secs() + w.duration_s;
            for fr in w.frames {
                assert!(fr.t.as_secs() >= w.start.as_secs() - 1e-9);
                assert!(fr.t.as_secs() < end);
            }
            for ch in &w.physio {
                for (t0, seg) in &ch.segments {
                    assert!(*t0 >= w.start.as_secs() - 1e-9);
                    let last = t0 + (seg.len() - 1) as f64 / ch.fs;
                    assert!(last < end + 1e-9);
                }
            }
        }
    }

    #[test]
    fn align_zero_offset_is_identity() {
        let mut s = toy_session(10.0, 30.0, 256.0);
        s.sync_markers = vec![
            SyncMarker { video_us: 0, physio_us: 0 },
            SyncMarker { video_us: 5_000_000, physio_us: 5_000_000 },
        ];
        let aligned = align_streams(&s, 10.0).unwrap();
        assert_eq!(aligned, s);
    }

    #[test]
    fn align_corrects_marker_offset() {
        let mut s = toy_session(10.0, 30.0, 256.0);
        let shift = 4_000; // 4 ms
        for fr in &mut s.frames {
            fr.t = Timestamp(fr.t.micros() + shift);
        }
        s.sync_markers = vec![
            SyncMarker { video_us: shift, physio_us: 0 },
            SyncMarker { video_us: 5_000_000 + shift, physio_us: 5_000_000 },
            SyncMarker { video_us: 9_000_000 + shift, physio_us: 9_000_000 },
        ];
        let aligned = align_streams(&s, 10.0).unwrap();
        assert_eq!(aligned.frames.len(), s.frames.len());
        assert_eq!(aligned.frames[0].t.micros(), 0);
        // idempotent
        let again = align_streams(&aligned, 10.0).unwrap();
        assert_eq!(again, aligned);
    }

    #[test]
    fn align_rejects_excessive_drift() {
        let mut s = toy_session(10.0, 30.0, 256.0);
        s.sync_markers = vec![SyncMarker { video_us: 200_000, physio_us: 0 }];
        let err = align_streams(&s, 10.0).unwrap_err();
        assert!(matches!(err, SessionError::ExcessiveDrift { .. }));
    }

    #[test]
    fn align_empty_stream_errors() {
        let mut s = toy_session(10.0, 30.0, 256.0);
        s.frames.clear();
        assert!(matches!(
            align_streams(&s, 10.0),
            Err(SessionError::EmptyStream("frames"))
        ));
    }

    #[test]
    fn validate_catches_non_monotone_frames() {
        let mut s = toy_session(10.0, 30.0, 256.0);
        s.frames[5].t = Timestamp(0);
        s.frames[4].t = Timestamp(1_000_000);
        let err = s.validate().unwrap_err();
        assert_eq!(err.to_string(), "non-monotone timestamps in frames");
    }

    #[test]
    fn state_at_follows_change_points() {
        let mut s = toy_session(10.0, 30.0, 256.0);
        s.labels = vec![(Timestamp(0), State::Alert), (Timestamp::from_secs(4.0), State::Drowsy)];
        assert_eq!(s.state_at(0.0), State::Alert);
        assert_eq!(s.state_at(3.9), State::Alert);
        assert_eq!(s.state_at(4.0), State::Drowsy);
        assert_eq!(s.state_at(9.0), State::Drowsy);
        let _ = format!("{}", s.state_at(9.0));
    }
}
