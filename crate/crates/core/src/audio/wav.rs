use std::io::{Cursor, Seek, Write};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use serde::{Deserialize, Serialize};

use super::{AudioClip, AudioError};

const PCM16_SCALE: f64 = 32768.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WavEncoding {
    Pcm16,
    Float32,
}

/// What `write_wav` had to do to fit the samples into the encoding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WriteReport {
    /// PCM16 samples whose code was clamped to `[-32768, 32767]`.
    pub clipped_samples: usize,
}

fn hound_err(e: hound::Error) -> AudioError {
    match e {
        hound::Error::IoError(io) => AudioError::IoFailure(io.to_string()),
        hound::Error::Unsupported => AudioError::UnsupportedEncoding("unsupported WAV feature".into()),
        other => AudioError::UnsupportedEncoding(other.to_string()),
    }
}

/// Reads a mono PCM16 or IEEE float32 WAV file. PCM16 codes are divided by 32768.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioClip, AudioError> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(AudioError::NotFound(path.display().to_string()));
    }
    let reader = WavReader::open(path).map_err(hound_err)?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(AudioError::MultiChannel(spec.channels));
    }
    let samples = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| f64::from(v) / PCM16_SCALE))
            .collect::<Result<Vec<_>, _>>()
            .map_err(hound_err)?,
        (SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<Result<Vec<_>, _>>()
            .map_err(hound_err)?,
        (fmt, bits) => {
            return Err(AudioError::UnsupportedEncoding(format!("{fmt:?} {bits}-bit")));
        }
    };
    AudioClip::new(samples, spec.sample_rate)
}

/// PCM16 quantizer: `round(x * 32768)` clamped to the i16 range.
/// Returns the code and whether clamping occurred.
pub(crate) fn quantize_pcm16(x: f64) -> (i16, bool) {
    let code = (x * PCM16_SCALE).round();
    if code > f64::from(i16::MAX) {
        (i16::MAX, true)
    } else if code < f64::from(i16::MIN) {
        (i16::MIN, true)
    } else if code.is_nan() {
        (0, true)
    } else {
        (code as i16, false)
    }
}

/// Writes `clip` as a mono WAV. Float32 is lossless for samples that are
/// exactly representable as `f32`; PCM16 is within `1/32768` for in-range samples.
pub fn write_wav(
    path: impl AsRef<Path>,
    clip: &AudioClip,
    encoding: WavEncoding,
) -> Result<WriteReport, AudioError> {
    let file = std::fs::File::create(path.as_ref()).map_err(|e| AudioError::IoFailure(e.to_string()))?;
    write_wav_to(std::io::BufWriter::new(file), clip, encoding)
}

/// In-memory WAV file bytes.
pub fn encode_wav(clip: &AudioClip, encoding: WavEncoding) -> Result<(Vec<u8>, WriteReport), AudioError> {
    let mut buf = Cursor::new(Vec::new());
    let report = write_wav_to(&mut buf, clip, encoding)?;
    Ok((buf.into_inner(), report))
}

fn write_wav_to<W: Write + Seek>(sink: W, clip: &AudioClip, encoding: WavEncoding) -> Result<WriteReport, AudioError> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate_hz(),
        bits_per_sample: match encoding {
            WavEncoding::Pcm16 => 16,
            WavEncoding::Float32 => 32,
        },
        sample_format: match encoding {
            WavEncoding::Pcm16 => SampleFormat::Int,
            WavEncoding::Float32 => SampleFormat::Float,
        },
    };
    let io = |e: hound::Error| AudioError::IoFailure(e.to_string());
    let mut writer = WavWriter::new(sink, spec).map_err(io)?;
    let mut report = WriteReport::default();
    match encoding {
        WavEncoding::Pcm16 => {
            for &x in clip.samples() {
                let (code, clipped) = quantize_pcm16(x);
                report.clipped_samples += usize::from(clipped);
                writer.write_sample(code).map_err(io)?;
            }
        }
        WavEncoding::Float32 => {
            for &x in clip.samples() {
                writer.write_sample(x as f32).map_err(io)?;
            }
        }
    }
    writer.finalize().map_err(io)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn zeros_read_back() {
        let dir = tmp();
        let p = dir.path().join("z.wav");
        let clip = AudioClip::silence(16000, 16000).unwrap();
        write_wav(&p, &clip, WavEncoding::Pcm16).unwrap();
        let back = read_wav(&p).unwrap();
        assert_eq!(back.len(), 16000);
        assert_eq!(back.sample_rate_hz(), 16000);
        assert!(back.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn pcm16_code_16384_is_half() {
        let dir = tmp();
        let p = dir.path().join("h.wav");
        let spec = WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(&p, spec).unwrap();
        w.write_sample(16384i16).unwrap();
        w.finalize().unwrap();
        assert_eq!(read_wav(&p).unwrap().samples(), &[0.5]);
    }

    #[test]
    fn stereo_is_rejected() {
        let dir = tmp();
        let p = dir.path().join("s.wav");
        let spec = WavSpec {
            channels: 2,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(&p, spec).unwrap();
        w.write_sample(0i16).unwrap();
        w.write_sample(0i16).unwrap();
        w.finalize().unwrap();
        assert!(matches!(read_wav(&p), Err(AudioError::MultiChannel(2))));
    }

    #[test]
    fn missing_file_and_unsupported_depth() {
        assert!(matches!(read_wav("/nonexistent/x.wav"), Err(AudioError::NotFound(_))));
        let dir = tmp();
        let p = dir.path().join("24.wav");
        let spec = WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 24,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(&p, spec).unwrap();
        w.write_sample(100i32).unwrap();
        w.finalize().unwrap();
        assert!(matches!(read_wav(&p), Err(AudioError::UnsupportedEncoding(_))));
    }

    #[test]
    fn float32_round_trip_is_bit_identical() {
        let dir = tmp();
        let p = dir.path().join("f.wav");
        let samples: Vec<f64> = (0..1000).map(|i| f64::from(((i as f32) * 0.37).sin() * 0.9)).collect();
        let clip = AudioClip::new(samples.clone(), 44100).unwrap();
        write_wav(&p, &clip, WavEncoding::Float32).unwrap();
        let back = read_wav(&p).unwrap();
        assert_eq!(back.samples(), &samples[..]);
        assert_eq!(back.sample_rate_hz(), 44100);
    }

    #[test]
    fn pcm16_round_trip_within_quantum() {
        let dir = tmp();
        let p = dir.path().join("q.wav");
        let samples: Vec<f64> = (0..2000).map(|i| (i as f64 * 0.011).sin() * 0.99).chain([0.5]).collect();
        let clip = AudioClip::new(samples.clone(), 16000).unwrap();
        let report = write_wav(&p, &clip, WavEncoding::Pcm16).unwrap();
        assert_eq!(report.clipped_samples, 0);
        let back = read_wav(&p).unwrap();
        for (a, b) in samples.iter().zip(back.samples()) {
            assert!((a - b).abs() <= 1.0 / 32768.0);
        }
        assert_eq!(*back.samples().last().unwrap(), 0.5);
    }

    #[test]
    fn pcm16_clamps_and_flags_overrange() {
        // 1.5 * 32768 = 49152 > 32767 -> clamped to max code.
        assert_eq!(quantize_pcm16(1.5), (i16::MAX, true));
        assert_eq!(quantize_pcm16(-1.5), (i16::MIN, true));
        assert_eq!(quantize_pcm16(-1.0), (i16::MIN, false));
        let dir = tmp();
        let p = dir.path().join("c.wav");
        let clip = AudioClip::new(vec![1.5, 0.25, -2.0], 16000).unwrap();
        let report = write_wav(&p, &clip, WavEncoding::Pcm16).unwrap();
        assert_eq!(report.clipped_samples, 2);
        let back = read_wav(&p).unwrap();
        assert_eq!(back.samples(), &[32767.0 / 32768.0, 0.25, -1.0]);
    }

    #[test]
    fn in_memory_bytes_match_file() {
        let dir = tmp();
        let p = dir.path().join("m.wav");
        let clip = AudioClip::new(vec![0.25, -0.5, 0.1], 8000).unwrap();
        write_wav(&p, &clip, WavEncoding::Pcm16).unwrap();
        let (bytes, _) = encode_wav(&clip, WavEncoding::Pcm16).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), bytes);
        assert_eq!(bytes.len(), 44 + 6);
    }
}
