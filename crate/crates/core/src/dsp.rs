//! Filter and spectrum internals shared by the physio features.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

/// One direct-form-I biquad section (normalized a0 = 1).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    fn run(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(x.len());
        let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
        for &v in x {
            let y = self.b0 * v + self.b1 * x1 + self.b2 * x2 - self.a1 * y1 - self.a2 * y2;
            x2 = x1;
            x1 = v;
            y2 = y1;
            y1 = y;
            out.push(y);
        }
        out
    }
}

/// Butterworth prototype poles (unit cutoff, left half plane),
/// as (re, im) with only one of each conjugate pair, plus an optional
/// real pole for odd orders.
fn prototype_pairs(order: usize) -> (Vec<(f64, f64)>, bool) {
    let mut pairs = Vec::new();
    for k in 1..=order / 2 {
        let theta = (2 * k - 1) as f64 * PI / (2.0 * order as f64);
        pairs.push((-theta.sin(), theta.cos()));
    }
    (pairs, order % 2 == 1)
}

/// Low-pass Butterworth of the given order at cutoff `fc`, realized as
/// biquad sections via the bilinear transform with prewarping.
pub(crate) fn butter_lowpass(order: usize, fc: f64, fs: f64) -> Vec<Biquad> {
    let wc = 2.0 * fs * (PI * fc / fs).tan();
    let k = 2.0 * fs;
    let (pairs, odd) = prototype_pairs(order);
    let mut secs = Vec::new();
    for (re, _) in pairs {
        // H(s) = wc^2 / (s^2 - 2 re wc s + wc^2) since |p| = 1
        let c1 = -2.0 * re * wc;
        let c0 = wc * wc;
        let a0 = k * k + c1 * k + c0;
        secs.push(Biquad {
            b0: wc * wc / a0,
            b1: 2.0 * wc * wc / a0,
            b2: wc * wc / a0,
            a1: (2.0 * c0 - 2.0 * k * k) / a0,
            a2: (k * k - c1 * k + c0) / a0,
        });
    }
    if odd {
        // real pole at -wc: H(s) = wc / (s + wc)
        let a0 = k + wc;
        secs.push(Biquad {
            b0: wc / a0,
            b1: wc / a0,
            b2: 0.0,
            a1: (wc - k) / a0,
            a2: 0.0,
        });
    }
    secs
}

/// High-pass Butterworth of the given order at cutoff `fc`.
pub(crate) fn butter_highpass(order: usize, fc: f64, fs: f64) -> Vec<Biquad> {
    let wc = 2.0 * fs * (PI * fc / fs).tan();
    let k = 2.0 * fs;
    let (pairs, odd) = prototype_pairs(order);
    let mut secs = Vec::new();
    for (re, _) in pairs {
        // H(s) = s^2 / (s^2 - 2 re wc s + wc^2)
        let c1 = -2.0 * re * wc;
        let c0 = wc * wc;
        let a0 = k * k + c1 * k + c0;
        secs.push(Biquad {
            b0: k * k / a0,
            b1: -2.0 * k * k / a0,
            b2: k * k / a0,
            a1: (2.0 * c0 - 2.0 * k * k) / a0,
            a2: (k * k - c1 * k + c0) / a0,
        });
    }
    if odd {
        // H(s) = s / (s + wc)
        let a0 = k + wc;
        secs.push(Biquad {
            b0: k / a0,
            b1: -k / a0,
            b2: 0.0,
            a1: (wc - k) / a0,
            a2: 0.0,
        });
    }
    secs
}

fn run_cascade(secs: &[Biquad], x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    for s in secs {
        y = s.run(&y);
    }
    y
}

/// Forward-backward (zero phase) filtering with odd-reflection edge
/// padding of `padlen` samples on each side.
pub(crate) fn filtfilt(secs: &[Biquad], x: &[f64], padlen: usize) -> Vec<f64> {
    let n = x.len();
    let padlen = padlen.min(n.saturating_sub(1));
    let mut ext = Vec::with_capacity(n + 2 * padlen);
    let first = x[0];
    for k in (1..=padlen).rev() {
        ext.push(2.0 * first - x[k]);
    }
    ext.extend_from_slice(x);
    let last = x[n - 1];
    for k in 1..=padlen {
        ext.push(2.0 * last - x[n - 1 - k]);
    }
    let mut y = run_cascade(secs, &ext);
    y.reverse();
    y = run_cascade(secs, &y);
    y.reverse();
    y[padlen..padlen + n].to_vec()
}

/// In-place radix-2 Cooley-Tukey FFT; `re`/`im` length must be a power
/// of two.
fn fft_radix2(re: &mut [f64], im: &mut [f64]) {
    let n = re.len();
    debug_assert!(n.is_power_of_two());
    // bit reversal
    let mut j = 0usize;
    for i in 0..n {
        if i < j {
            re.swap(i, j);
            im.swap(i, j);
        }
        let mut m = n >> 1;
        while m >= 1 && j & m != 0 {
            j ^= m;
            m >>= 1;
        }
        j |= m;
    }
    let mut len = 2;
    while len <= n {
        let ang = -2.0 * PI / len as f64;
        let (wr, wi) = (ang.cos(), ang.sin());
        let mut start = 0;
        while start < n {
            let (mut cr, mut ci) = (1.0, 0.0);
            for k in 0..len / 2 {
                let i = start + k;
                let j = i + len / 2;
                let tr = cr * re[j] - ci * im[j];
                let ti = cr * im[j] + ci * re[j];
                re[j] = re[i] - tr;
                im[j] = im[i] - ti;
                re[i] += tr;
                im[i] += ti;
                let ncr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = ncr;
            }
            start += len;
        }
        len <<= 1;
    }
}

/// Magnitude-squared spectrum `|X_k|^2` for `k = 0..n/2` inclusive.
/// Power-of-two lengths go through the radix-2 FFT, anything else through
/// a direct DFT (window segments are short, so this stays affordable).
pub(crate) fn spectrum_mag_sq(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n.is_power_of_two() {
        let mut re = x.to_vec();
        let mut im = vec![0.0; n];
        fft_radix2(&mut re, &mut im);
        (0..=n / 2).map(|k| re[k] * re[k] + im[k] * im[k]).collect()
    } else {
        let mut out = Vec::with_capacity(n / 2 + 1);
        for k in 0..=n / 2 {
            let (mut sr, mut si) = (0.0, 0.0);
            let w = -2.0 * PI * k as f64 / n as f64;
            for (i, &v) in x.iter().enumerate() {
                let a = w * i as f64;
                sr += v * a.cos();
                si += v * a.sin();
            }
            out.push(sr * sr + si * si);
        }
        out
    }
}

/// Hann window of length `n`.
pub(crate) fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (n as f64 - 1.0)).cos())
        .collect()
}

/// One-sided Welch power spectral density: Hann-tapered segments of
/// `seg_len` samples with 50% overlap. Returns `(frequencies, psd)` with
/// bin spacing `fs / seg_len`.
pub(crate) fn welch_psd(x: &[f64], fs: f64, seg_len: usize) -> (Vec<f64>, Vec<f64>) {
    debug_assert!(x.len() >= seg_len && seg_len >= 2);
    let step = (seg_len / 2).max(1);
    let w = hann(seg_len);
    let u: f64 = w.iter().map(|v| v * v).sum();
    let nbins = seg_len / 2 + 1;
    let mut acc = vec![0.0; nbins];
    let mut count = 0usize;
    let mut start = 0;
    while start + seg_len <= x.len() {
        let tapered: Vec<f64> = x[start..start + seg_len]
            .iter()
            .zip(&w)
            .map(|(v, wv)| v * wv)
            .collect();
        let mag = spectrum_mag_sq(&tapered);
        for (k, m) in mag.iter().enumerate() {
            let one_sided = if k == 0 || k == nbins - 1 { 1.0 } else { 2.0 };
            acc[k] += one_sided * m / (fs * u);
        }
        count += 1;
        start += step;
    }
    for v in &mut acc {
        *v /= count as f64;
    }
    let freqs = (0..nbins).map(|k| k as f64 * fs / seg_len as f64).collect();
    (freqs, acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_matches_naive_dft() {
        let x: Vec<f64> = (0..64).map(|i| ((i * 7 % 13) as f64).sin() + 0.3 * i as f64).collect();
        let fast = spectrum_mag_sq(&x);
        // force the naive path with an odd length over the same data
        let mut slow = Vec::new();
        let n = x.len();
        for k in 0..=n / 2 {
            let (mut sr, mut si) = (0.0, 0.0);
            for (i, &v) in x.iter().enumerate() {
                let a = -2.0 * PI * (k * i) as f64 / n as f64;
                sr += v * a.cos();
                si += v * a.sin();
            }
            slow.push(sr * sr + si * si);
        }
        for (f, s) in fast.iter().zip(&slow) {
            assert!((f - s).abs() < 1e-6 * (1.0 + s.abs()), "{f} vs {s}");
        }
    }

    #[test]
    fn welch_total_power_of_unit_sine() {
        let fs = 256.0;
        let n = (10.0 * fs) as usize;
        let x: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * 10.0 * i as f64 / fs).sin())
            .collect();
        let (f, p) = welch_psd(&x, fs, 512);
        let df = f[1] - f[0];
        let total: f64 = p.iter().sum::<f64>() * df;
        assert!((total - 0.5).abs() < 0.01, "total {total}");
    }

    #[test]
    fn filtfilt_zero_in_zero_out() {
        let secs = butter_highpass(4, 0.5, 256.0);
        let y = filtfilt(&secs, &[0.0; 512], 27);
        assert!(y.iter().all(|&v| v == 0.0));
    }
}
