use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{AudioClip, AudioError};

pub const DEFAULT_FFT_SIZE: usize = 1024;
pub const DEFAULT_HOP: usize = 256;

/// Overlap-add normalizations below this are treated as uncovered samples.
const WOLA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Hann,
}

/// One-sided short-time spectrum. Frame `m` is centred on sample `m * hop`;
/// samples before the clip start or past its end are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    frames: Vec<Vec<Complex64>>,
    fft_size: usize,
    hop: usize,
    window_kind: WindowKind,
    sample_rate_hz: u32,
}

impl Spectrogram {
    pub fn frames(&self) -> &[Vec<Complex64>] {
        &self.frames
    }

    pub fn frames_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.frames
    }

    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn num_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn window_kind(&self) -> WindowKind {
        self.window_kind
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn bin_center_hz(&self, k: usize) -> f64 {
        k as f64 * f64::from(self.sample_rate_hz) / self.fft_size as f64
    }

    /// Multiplies every bin by `gain(f_hz)`; the gain is evaluated once per bin.
    pub fn apply_gain(&mut self, gain: impl Fn(f64) -> f64) {
        let gains: Vec<f64> = (0..self.num_bins()).map(|k| gain(self.bin_center_hz(k))).collect();
        for frame in &mut self.frames {
            for (c, g) in frame.iter_mut().zip(&gains) {
                *c *= *g;
            }
        }
    }

    /// Centre sample of frame `m`.
    pub fn frame_center(&self, m: usize) -> usize {
        m * self.hop
    }
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

fn check_config(fft_size: usize, hop: usize) -> Result<(), AudioError> {
    if fft_size < 2 || fft_size % 2 != 0 {
        return Err(AudioError::BadConfig(format!("fft_size {fft_size} must be even and >= 2")));
    }
    if hop == 0 || hop > fft_size || fft_size % hop != 0 {
        return Err(AudioError::BadConfig(format!(
            "hop {hop} must divide fft_size {fft_size}"
        )));
    }
    // Hann with no overlap has zero gain at every frame edge; nothing to invert there.
    if hop == fft_size {
        return Err(AudioError::BadConfig(format!(
            "hop {hop} equal to fft_size leaves frame edges unrecoverable"
        )));
    }
    Ok(())
}

/// Hann-windowed one-sided STFT with `ceil(len / hop)` frames.
pub fn stft(clip: &AudioClip, fft_size: usize, hop: usize) -> Result<Spectrogram, AudioError> {
    check_config(fft_size, hop)?;
    let x = clip.samples();
    if x.is_empty() {
        return Err(AudioError::BadConfig("cannot transform an empty clip".into()));
    }
    let n_frames = x.len().div_ceil(hop);
    let window = hann(fft_size);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(fft_size);
    let half = fft_size / 2;
    let mut buf = vec![Complex64::new(0.0, 0.0); fft_size];
    let mut frames = Vec::with_capacity(n_frames);
    for m in 0..n_frames {
        let start = (m * hop) as isize - half as isize;
        for (n, slot) in buf.iter_mut().enumerate() {
            let t = start + n as isize;
            let v = if t >= 0 && (t as usize) < x.len() {
                x[t as usize] * window[n]
            } else {
                0.0
            };
            *slot = Complex64::new(v, 0.0);
        }
        fft.process(&mut buf);
        frames.push(buf[..=half].to_vec());
    }
    Ok(Spectrogram {
        frames,
        fft_size,
        hop,
        window_kind: WindowKind::Hann,
        sample_rate_hz: clip.sample_rate_hz(),
    })
}

fn inverse_frame(fft: &Arc<dyn Fft<f64>>, bins: &[Complex64], out: &mut [Complex64]) {
    let n = out.len();
    let half = n / 2;
    out[..=half].copy_from_slice(bins);
    // DC and Nyquist of a real signal are real.
    out[0].im = 0.0;
    out[half].im = 0.0;
    for k in 1..half {
        out[n - k] = bins[k].conj();
    }
    fft.process(out);
    let scale = 1.0 / n as f64;
    for v in out.iter_mut() {
        *v *= scale;
    }
}

/// Weighted overlap-add inverse; output is truncated or zero-padded to `target_len`.
pub fn istft(spec: &Spectrogram, target_len: usize) -> AudioClip {
    let n = spec.fft_size;
    let half = n / 2;
    let window = hann(n);
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(n);
    // Samples past the last frame centre's hop carry only zero padding.
    let out_len = spec.num_frames() * spec.hop;
    let mut acc = vec![0.0; out_len];
    let mut norm = vec![0.0; out_len];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (m, bins) in spec.frames.iter().enumerate() {
        inverse_frame(&fft, bins, &mut buf);
        let start = (m * spec.hop) as isize - half as isize;
        for (i, v) in buf.iter().enumerate() {
            let t = start + i as isize;
            if t < 0 || t as usize >= out_len {
                continue;
            }
            let t = t as usize;
            acc[t] += v.re * window[i];
            norm[t] += window[i] * window[i];
        }
    }
    let mut samples: Vec<f64> = acc
        .iter()
        .zip(&norm)
        .map(|(a, w)| if *w > WOLA_FLOOR { a / w } else { 0.0 })
        .collect();
    samples.resize(target_len, 0.0);
    AudioClip {
        samples,
        sample_rate_hz: spec.sample_rate_hz,
    }
}
