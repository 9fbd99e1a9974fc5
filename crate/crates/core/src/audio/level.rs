use super::{AudioClip, AudioError};

/// `10^(db / 20)`; `-inf` maps to 0.
pub fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

pub fn peak(clip: &AudioClip) -> f64 {
    clip.samples().iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn rms(clip: &AudioClip) -> f64 {
    if clip.is_empty() {
        return 0.0;
    }
    (clip.samples().iter().map(|v| v * v).sum::<f64>() / clip.len() as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakNormalized {
    pub clip: AudioClip,
    /// Applied linear gain (1.0 when the input was silent).
    pub gain: f64,
    /// The input had no non-zero sample and was returned unchanged.
    pub silent_input: bool,
}

/// Scales `clip` so its largest absolute sample equals `10^(target_dbfs / 20)`.
pub fn peak_normalize(clip: &AudioClip, target_dbfs: f64) -> PeakNormalized {
    let p = peak(clip);
    if p == 0.0 || !p.is_finite() {
        if p == 0.0 {
            log::warn!("peak_normalize: silent input left unchanged");
        }
        return PeakNormalized {
            clip: clip.clone(),
            gain: 1.0,
            silent_input: p == 0.0,
        };
    }
    let target = db_to_amplitude(target_dbfs);
    let gain = target / p;
    let samples = clip.samples().iter().map(|v| v * gain).collect();
    PeakNormalized {
        clip: clip.with_samples(samples),
        gain,
        silent_input: false,
    }
}

/// `primary[i] + 10^(gain_db/20) * secondary[i mod len(secondary)]`.
/// `gain_db = -inf` disables the secondary signal.
pub fn mix(primary: &AudioClip, secondary: &AudioClip, gain_db: f64) -> Result<AudioClip, AudioError> {
    if primary.sample_rate_hz() != secondary.sample_rate_hz() {
        return Err(AudioError::RateMismatch(
            primary.sample_rate_hz(),
            secondary.sample_rate_hz(),
        ));
    }
    let g = db_to_amplitude(gain_db);
    if g == 0.0 || secondary.is_empty() {
        return Ok(primary.clone());
    }
    let sec = secondary.samples();
    let samples = primary
        .samples()
        .iter()
        .enumerate()
        .map(|(i, p)| p + g * sec[i % sec.len()])
        .collect();
    Ok(primary.with_samples(samples))
}
