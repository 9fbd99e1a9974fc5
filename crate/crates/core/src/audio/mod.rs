//! Mono audio container, WAV I/O, STFT/ISTFT and amplitude utilities.

mod level;
mod stft;
mod wav;

pub use level::{db_to_amplitude, mix, peak, peak_normalize, rms, PeakNormalized};
pub use stft::{istft, stft, Spectrogram, WindowKind, DEFAULT_FFT_SIZE, DEFAULT_HOP};
pub use wav::{encode_wav, read_wav, write_wav, WavEncoding, WriteReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("file not found: {0}")]
    NotFound(String),
    #[error("unsupported WAV encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("expected mono audio, found {0} channels")]
    MultiChannel(u16),
    #[error("I/O failure: {0}")]
    IoFailure(String),
    #[error("bad STFT configuration: {0}")]
    BadConfig(String),
    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    RateMismatch(u32, u32),
    #[error("sample rate must be positive")]
    ZeroSampleRate,
}

/// A mono buffer of real amplitudes with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self, AudioError> {
        if sample_rate_hz == 0 {
            return Err(AudioError::ZeroSampleRate);
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn silence(len: usize, sample_rate_hz: u32) -> Result<Self, AudioError> {
        Self::new(vec![0.0; len], sample_rate_hz)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate_hz)
    }

    /// Copies `[start, end)` (sample indices, clamped to the buffer) into a new clip.
    pub fn slice(&self, start: usize, end: usize) -> AudioClip {
        let end = end.min(self.samples.len());
        let start = start.min(end);
        AudioClip {
            samples: self.samples[start..end].to_vec(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    /// Same rate, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> AudioClip {
        AudioClip {
            samples,
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    /// Sample index nearest to `t_s` seconds.
    pub fn index_at(&self, t_s: f64) -> usize {
        (t_s * f64::from(self.sample_rate_hz)).round().max(0.0) as usize
    }
}
