use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::curves::{lowpass_gain, ripple_gain, scoop_gain, shelf_gain, wobble_gain};
use super::recipe::{
    AugmentRecipe, CoveredMicParams, DegradedZone, Effect, NoiseSource, UnderwaterParams,
};
use super::AugmentError;
use crate::audio::{istft, peak_normalize, rms, stft, AudioClip, AudioError};

/// Final peak level of every augmented chunk.
pub const OUTPUT_PEAK_DBFS: f64 = -1.0;

/// Seed offset for synthetic background noise so it never repeats the zone noise.
const BACKGROUND_SEED_SALT: u64 = 0x6267_6e6f_6973_6521;

/// STFT size giving roughly 64 ms frames (1024 at 16 kHz), with 75 % overlap.
fn frame_params(sample_rate_hz: u32) -> (usize, usize) {
    let target = (1024.0 * f64::from(sample_rate_hz) / 16000.0).max(64.0);
    let mut fft = 64usize;
    while (fft * 2) as f64 <= target {
        fft *= 2;
    }
    if target / fft as f64 > 1.5 {
        fft *= 2;
    }
    (fft, fft / 4)
}

/// Applies a per-bin magnitude gain to a whole clip.
fn shape_spectrum(clip: &AudioClip, gain: impl Fn(f64) -> f64) -> Result<AudioClip, AudioError> {
    if clip.is_empty() {
        return Ok(clip.clone());
    }
    let (fft, hop) = frame_params(clip.sample_rate_hz());
    let mut spec = stft(clip, fft, hop)?;
    spec.apply_gain(gain);
    Ok(istft(&spec, clip.len()))
}

/// `tanh(drive * x)` per sample.
pub fn soft_clip(clip: &AudioClip, drive: f64) -> AudioClip {
    clip.with_samples(clip.samples().iter().map(|v| (drive * v).tanh()).collect())
}

/// White Gaussian noise shaped by the low-pass curve, peak-normalised to `level_dbfs`.
pub fn shaped_noise(
    n_samples: usize,
    sample_rate_hz: u32,
    fc_hz: f64,
    slope_p: f64,
    level_dbfs: f64,
    seed: u64,
) -> Result<AudioClip, AugmentError> {
    if n_samples == 0 {
        return Err(AugmentError::InvalidParams("shaped noise needs at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let white: Vec<f64> = (0..n_samples).map(|_| StandardNormal.sample(&mut rng)).collect();
    let white = AudioClip::new(white, sample_rate_hz)?;
    let shaped = shape_spectrum(&white, |f| lowpass_gain(f, fc_hz, slope_p))?;
    Ok(peak_normalize(&shaped, level_dbfs).clip)
}

/// Sample span of `zone` in `clip`.
fn zone_span(clip: &AudioClip, zone: &DegradedZone) -> Result<(usize, usize), AugmentError> {
    let duration_s = clip.duration_s();
    let half_sample = 0.5 / f64::from(clip.sample_rate_hz());
    let err = || AugmentError::ZoneOutOfRange {
        start_s: zone.start_s,
        end_s: zone.end_s,
        duration_s,
    };
    if !(zone.start_s >= 0.0) || !(zone.end_s > zone.start_s) || zone.end_s > duration_s + half_sample {
        return Err(err());
    }
    let start = clip.index_at(zone.start_s);
    let end = clip.index_at(zone.end_s).min(clip.len());
    if end <= start {
        return Err(err());
    }
    Ok((start, end))
}

/// Processes `[start - xf, end + xf)` with `wet` and blends it back with linear
/// ramps over the `xf` samples on each side of the zone. Samples outside that
/// span are copied untouched.
fn process_zone(
    clip: &AudioClip,
    zone: &DegradedZone,
    crossfade_s: f64,
    wet: impl FnOnce(&AudioClip, usize) -> Result<AudioClip, AugmentError>,
) -> Result<AudioClip, AugmentError> {
    let (zs, ze) = zone_span(clip, zone)?;
    let xf = (crossfade_s.max(0.0) * f64::from(clip.sample_rate_hz())).round() as usize;
    let seg_start = zs.saturating_sub(xf);
    let seg_end = (ze + xf).min(clip.len());
    let segment = clip.slice(seg_start, seg_end);
    let processed = wet(&segment, zs - seg_start)?;

    let mut out = clip.samples().to_vec();
    let ramp = (xf + 1) as f64;
    for (i, (&dry, &w)) in segment.samples().iter().zip(processed.samples()).enumerate() {
        let t = seg_start + i;
        let alpha = if t < zs {
            (t + xf + 1 - zs) as f64 / ramp
        } else if t >= ze {
            (ze + xf - t) as f64 / ramp
        } else {
            1.0
        };
        out[t] = if alpha >= 1.0 { w } else { dry + alpha * (w - dry) };
    }
    Ok(clip.with_samples(out))
}

/// Covered-microphone degradation of `zone`: low-pass, low-frequency shelf,
/// spectral ripple, shaped noise and `tanh` saturation.
pub fn apply_covered_mic(
    clip: &AudioClip,
    params: &CoveredMicParams,
    zone: &DegradedZone,
    crossfade_s: f64,
    seed: u64,
) -> Result<AudioClip, AugmentError> {
    params.validate().map_err(AugmentError::InvalidParams)?;
    process_zone(clip, zone, crossfade_s, |seg, _| {
        let p = *params;
        let filtered = shape_spectrum(seg, |f| {
            lowpass_gain(f, p.fc_hz, p.slope_p)
                * shelf_gain(f, p.lf_boost_db, CoveredMicParams::SHELF_CORNER_HZ)
                * ripple_gain(f, p.ripple_period_hz, p.ripple_depth)
        })?;
        let noisy = match p.noise_level_dbfs {
            Some(level) => {
                let noise = shaped_noise(seg.len(), seg.sample_rate_hz(), p.fc_hz, p.slope_p, level, seed)?;
                filtered.with_samples(
                    filtered.samples().iter().zip(noise.samples()).map(|(a, b)| a + b).collect(),
                )
            }
            None => filtered,
        };
        Ok(soft_clip(&noisy, p.clip_drive))
    })
}

/// Underwater degradation of `zone`: steep low-pass with a mid-frequency scoop,
/// then a slow amplitude wobble timed from the zone start.
pub fn apply_underwater(
    clip: &AudioClip,
    params: &UnderwaterParams,
    zone: &DegradedZone,
    crossfade_s: f64,
    _seed: u64,
) -> Result<AudioClip, AugmentError> {
    params.validate().map_err(AugmentError::InvalidParams)?;
    process_zone(clip, zone, crossfade_s, |seg, zone_offset| {
        let p = *params;
        let filtered = shape_spectrum(seg, |f| {
            lowpass_gain(f, p.fc_hz, p.slope_p) * scoop_gain(f, p.scoop_db, p.scoop_center_hz, p.scoop_q)
        })?;
        let sr = f64::from(seg.sample_rate_hz());
        let samples = filtered
            .samples()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let t = (i as f64 - zone_offset as f64) / sr;
                v * wobble_gain(t, p.wobble_hz, p.wobble_depth)
            })
            .collect();
        Ok(filtered.with_samples(samples))
    })
}

/// Adds `noise` (looped to the clip length) scaled so that
/// `rms(clip) / rms(scaled noise) = 10^(snr_db / 20)`.
pub fn mix_background_noise(
    clip: &AudioClip,
    noise: &AudioClip,
    snr_db: f64,
) -> Result<AudioClip, AugmentError> {
    if clip.sample_rate_hz() != noise.sample_rate_hz() {
        return Err(AudioError::RateMismatch(clip.sample_rate_hz(), noise.sample_rate_hz()).into());
    }
    if noise.is_empty() {
        return Err(AugmentError::SilentNoise);
    }
    let n = noise.samples();
    let looped: Vec<f64> = (0..clip.len()).map(|i| n[i % n.len()]).collect();
    let noise_rms = rms(&clip.with_samples(looped.clone()));
    if noise_rms == 0.0 {
        return Err(AugmentError::SilentNoise);
    }
    let gain = rms(clip) / (noise_rms * 10f64.powf(snr_db / 20.0));
    Ok(clip.with_samples(
        clip.samples().iter().zip(&looped).map(|(c, v)| c + gain * v).collect(),
    ))
}

/// [`augment_chunk_with_noise`] without an external noise clip; recipes that
/// reference a noise file fail with [`AugmentError::MissingNoise`].
pub fn augment_chunk(clip: &AudioClip, recipe: &AugmentRecipe) -> Result<AudioClip, AugmentError> {
    augment_chunk_with_noise(clip, recipe, None)
}

/// Background noise (if the recipe has any), then the zone effect, then peak
/// normalisation to −1 dBFS. Silent results are returned unscaled.
pub fn augment_chunk_with_noise(
    clip: &AudioClip,
    recipe: &AugmentRecipe,
    noise: Option<&AudioClip>,
) -> Result<AudioClip, AugmentError> {
    let base = match &recipe.background {
        None => clip.clone(),
        Some(bg) => match (&bg.source, noise) {
            (_, Some(n)) => mix_background_noise(clip, n, bg.snr_db)?,
            (NoiseSource::Synthetic, None) if !clip.is_empty() => {
                let sr = clip.sample_rate_hz();
                let synth = shaped_noise(
                    clip.len(),
                    sr,
                    f64::from(sr) / 4.0,
                    2.0,
                    0.0,
                    recipe.seed ^ BACKGROUND_SEED_SALT,
                )?;
                mix_background_noise(clip, &synth, bg.snr_db)?
            }
            (NoiseSource::Synthetic, None) => clip.clone(),
            (NoiseSource::File(name), None) => return Err(AugmentError::MissingNoise(name.clone())),
        },
    };
    let degraded = match &recipe.effect {
        Effect::CoveredMic(p) => apply_covered_mic(&base, p, &recipe.zone, recipe.crossfade_s, recipe.seed)?,
        Effect::Underwater(p) => apply_underwater(&base, p, &recipe.zone, recipe.crossfade_s, recipe.seed)?,
    };
    Ok(peak_normalize(&degraded, OUTPUT_PEAK_DBFS).clip)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::audio::{peak, Spectrogram};
    use crate::augment::recipe::{sample_recipe, BackgroundNoise, DEFAULT_CROSSFADE_S};

    const SR: u32 = 16000;

    fn sine(freq: f64, secs: f64, amp: f64) -> AudioClip {
        let n = (secs * f64::from(SR)) as usize;
        AudioClip::new(
            (0..n).map(|t| amp * (2.0 * PI * freq * t as f64 / f64::from(SR)).sin()).collect(),
            SR,
        )
        .unwrap()
    }

    fn plain_covered(fc: f64, p: f64) -> CoveredMicParams {
        CoveredMicParams {
            fc_hz: fc,
            slope_p: p,
            lf_boost_db: 0.0,
            ripple_period_hz: 850.0,
            ripple_depth: 0.0,
            noise_level_dbfs: None,
            clip_drive: 1.8,
        }
    }

    fn underwater(depth: f64) -> UnderwaterParams {
        UnderwaterParams {
            fc_hz: 1000.0,
            slope_p: 8.0,
            scoop_db: -10.0,
            scoop_center_hz: 1500.0,
            scoop_q: 2.2,
            wobble_hz: 0.35,
            wobble_depth: depth,
        }
    }

    fn energy(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn band_mean_magnitude(spec: &Spectrogram, lo_hz: f64, hi_hz: f64) -> f64 {
        let bins: Vec<usize> = (0..spec.num_bins())
            .filter(|&k| (lo_hz..=hi_hz).contains(&spec.bin_center_hz(k)))
            .collect();
        let mut sum = 0.0;
        for frame in spec.frames() {
            for &k in &bins {
                sum += frame[k].norm();
            }
        }
        sum / (bins.len() * spec.num_frames()) as f64
    }

    #[test]
    fn frame_params_scale_with_rate() {
        assert_eq!(frame_params(16000), (1024, 256));
        assert_eq!(frame_params(8000), (512, 128));
        assert_eq!(frame_params(44100), (2048, 512));
        assert_eq!(frame_params(48000), (2048, 512));
        assert_eq!(frame_params(96000), (4096, 1024));
    }

    #[test]
    fn soft_clip_values() {
        let c = AudioClip::new(vec![0.0, 1.0, -1.0, 1e6, -1e6], SR).unwrap();
        let out = soft_clip(&c, 1.8);
        assert_eq!(out.samples()[0], 0.0);
        assert!((out.samples()[1] - 0.946_806_012_846_268_1).abs() < 1e-12);
        assert!((out.samples()[1] - 0.9468).abs() < 1e-4);
        assert_eq!(out.samples()[2], -out.samples()[1]);
        // tanh saturates to exactly ±1 in f64 for huge arguments; moderate
        // inputs stay strictly inside.
        for x in [-5.0, -0.3, 0.7, 2.0] {
            assert!(((1.8f64) * x).tanh().abs() < 1.0);
        }
    }

    #[test]
    fn shaped_noise_level_and_determinism() {
        let a = shaped_noise(16000, SR, 1000.0, 6.0, -48.0, 42).unwrap();
        assert!((peak(&a) - 0.003_981_071_705_534_973).abs() < 1e-12);
        let b = shaped_noise(16000, SR, 1000.0, 6.0, -48.0, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, shaped_noise(16000, SR, 1000.0, 6.0, -48.0, 43).unwrap());
        assert!(shaped_noise(0, SR, 1000.0, 6.0, -48.0, 1).is_err());
    }

    #[test]
    fn shaped_noise_spectral_ratio() {
        // Band-mean ratio |G| at [4fc, 5fc] vs [0, fc/2]; analytic worst case for
        // p = 4 is 1/(1+4^4) ~ -48 dB, so 30 dB leaves ample margin for leakage.
        for (fc, p) in [(600.0, 4.0), (1000.0, 6.0), (1600.0, 4.0), (800.0, 10.0)] {
            let n = shaped_noise(64000, SR, fc, p, -40.0, 7).unwrap();
            let spec = stft(&n, 1024, 256).unwrap();
            let low = band_mean_magnitude(&spec, 0.0, fc / 2.0);
            let high = band_mean_magnitude(&spec, 4.0 * fc, 5.0 * fc);
            let ratio_db = 20.0 * (high / low).log10();
            assert!(ratio_db <= -30.0, "fc {fc} p {p}: {ratio_db}");
        }
    }

    #[test]
    fn silent_clip_without_noise_stays_silent() {
        let c = AudioClip::silence(SR as usize * 8, SR).unwrap();
        let zone = DegradedZone { start_s: 1.0, end_s: 7.0 };
        let out = apply_covered_mic(&c, &plain_covered(1000.0, 6.0), &zone, DEFAULT_CROSSFADE_S, 1).unwrap();
        assert!(out.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn covered_mic_attenuates_high_tone_in_zone() {
        let c = sine(4000.0, 10.0, 0.5);
        let zone = DegradedZone { start_s: 2.0, end_s: 8.0 };
        let out = apply_covered_mic(&c, &plain_covered(800.0, 8.0), &zone, DEFAULT_CROSSFADE_S, 1).unwrap();
        // interior of the zone, clear of ramps and frame edges
        let (a, b) = (3 * SR as usize, 7 * SR as usize);
        let att_db = 10.0 * (energy(&out.samples()[a..b]) / energy(&c.samples()[a..b])).log10();
        assert!(att_db <= -50.0, "{att_db}");
    }

    #[test]
    fn samples_outside_zone_and_crossfade_are_untouched() {
        let c = sine(300.0, 12.0, 0.4);
        let zone = DegradedZone { start_s: 3.0, end_s: 9.5 };
        let xf = (DEFAULT_CROSSFADE_S * f64::from(SR)) as usize;
        let (zs, ze) = (3 * SR as usize, (9.5 * f64::from(SR)) as usize);
        let mut p = plain_covered(1200.0, 6.0);
        p.noise_level_dbfs = Some(-40.0);
        p.lf_boost_db = 5.0;
        p.ripple_depth = 0.15;
        for out in [
            apply_covered_mic(&c, &p, &zone, DEFAULT_CROSSFADE_S, 5).unwrap(),
            apply_underwater(&c, &underwater(0.3), &zone, DEFAULT_CROSSFADE_S, 5).unwrap(),
        ] {
            assert_eq!(&out.samples()[..zs - xf], &c.samples()[..zs - xf]);
            assert_eq!(&out.samples()[ze + xf..], &c.samples()[ze + xf..]);
            assert_ne!(&out.samples()[zs..ze], &c.samples()[zs..ze]);
        }
    }

    #[test]
    fn zone_out_of_range() {
        let c = sine(300.0, 4.0, 0.4);
        for zone in [
            DegradedZone { start_s: 2.0, end_s: 6.0 },
            DegradedZone { start_s: -1.0, end_s: 2.0 },
            DegradedZone { start_s: 3.0, end_s: 3.0 },
        ] {
            assert!(matches!(
                apply_underwater(&c, &underwater(0.3), &zone, 0.05, 0),
                Err(AugmentError::ZoneOutOfRange { .. })
            ));
        }
    }

    #[test]
    fn underwater_scoop_at_centre() {
        // constant tone at the scoop centre: gain = lowpass(1500,1000,8) * 10^(-10/20)
        let c = sine(1500.0, 10.0, 0.5);
        let zone = DegradedZone { start_s: 0.0, end_s: 10.0 };
        let out = apply_underwater(&c, &underwater(0.0), &zone, 0.05, 0).unwrap();
        let (a, b) = (2 * SR as usize, 8 * SR as usize);
        let measured = (energy(&out.samples()[a..b]) / energy(&c.samples()[a..b])).sqrt();
        let expected = lowpass_gain(1500.0, 1000.0, 8.0) * 10f64.powf(-0.5);
        assert!((20.0 * (measured / expected).log10()).abs() < 0.5);
    }

    #[test]
    fn zero_wobble_is_time_invariant() {
        let c = sine(500.0, 10.0, 0.5);
        let zone = DegradedZone { start_s: 0.0, end_s: 10.0 };
        let out = apply_underwater(&c, &underwater(0.0), &zone, 0.05, 0).unwrap();
        let block = SR as usize;
        let e: Vec<f64> = (1..9).map(|s| energy(&out.samples()[s * block..(s + 1) * block])).collect();
        let (min, max) = e.iter().fold((f64::MAX, 0.0f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
        assert!(max / min < 1.001, "{min} {max}");
    }

    #[test]
    fn wobble_envelope_period() {
        // 10 s zone, 500 Hz tone well inside the passband: the envelope minima
        // (sin = +1) sit at t = (0.25 + k) / 0.35 s from the zone start: 0.71, 3.57, 6.43, 9.29.
        let c = sine(500.0, 12.0, 0.5);
        let zone = DegradedZone { start_s: 1.0, end_s: 11.0 };
        let out = apply_underwater(&c, &underwater(0.6), &zone, 0.05, 0).unwrap();
        let win = 160; // 10 ms, 5 periods of 500 Hz
        let env: Vec<f64> = out.samples()[SR as usize..11 * SR as usize]
            .chunks(win)
            .map(|w| (energy(w) / w.len() as f64).sqrt())
            .collect();
        let mut minima = Vec::new();
        for i in 20..env.len() - 20 {
            let w = &env[i - 20..=i + 20];
            if w.iter().all(|v| env[i] <= *v) {
                minima.push(i as f64 * win as f64 / f64::from(SR));
            }
        }
        minima.dedup_by(|a, b| (*a - *b).abs() < 0.5);
        assert_eq!(minima.len(), 4, "{minima:?}");
        let periods: Vec<f64> = minima.windows(2).map(|w| w[1] - w[0]).collect();
        for p in periods {
            assert!((p - 1.0 / 0.35).abs() < 0.05, "{p}");
        }
    }

    #[test]
    fn background_mix_hits_requested_snr() {
        let c = sine(440.0, 2.0, 0.3);
        let noise = shaped_noise(5000, SR, 3000.0, 2.0, -6.0, 3).unwrap();
        for snr in [-5.0, 0.0, 10.0, 17.3, 25.0] {
            let out = mix_background_noise(&c, &noise, snr).unwrap();
            let resid = c.with_samples(out.samples().iter().zip(c.samples()).map(|(o, x)| o - x).collect());
            let measured = 20.0 * (rms(&c) / rms(&resid)).log10();
            assert!((measured - snr).abs() < 0.1, "{snr} vs {measured}");
        }
    }

    #[test]
    fn background_mix_edge_cases() {
        let c = sine(440.0, 1.0, 0.3);
        let doubled = mix_background_noise(&c, &c, 0.0).unwrap();
        assert!((rms(&doubled) / rms(&c) - 2.0).abs() < 1e-9);
        let barely = mix_background_noise(&c, &sine(1000.0, 0.5, 1.0), 100.0).unwrap();
        let diff = barely.samples().iter().zip(c.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-4 * rms(&c));
        assert!(matches!(
            mix_background_noise(&c, &AudioClip::silence(10, SR).unwrap(), 10.0),
            Err(AugmentError::SilentNoise)
        ));
        assert!(matches!(
            mix_background_noise(&c, &AudioClip::new(vec![0.1], 8000).unwrap(), 10.0),
            Err(AugmentError::Audio(AudioError::RateMismatch(..)))
        ));
    }

    #[test]
    fn augment_chunk_normalises_and_is_deterministic() {
        let c = sine(700.0, 14.0, 0.2);
        for i in 0..6 {
            let r = sample_recipe(77, &format!("c{i}"), c.duration_s());
            let a = augment_chunk(&c, &r).unwrap();
            assert!((peak(&a) - 0.8913).abs() < 0.001);
            assert_eq!(a, augment_chunk(&c, &r).unwrap());
        }
    }

    #[test]
    fn augment_chunk_background_sources() {
        let c = sine(700.0, 6.0, 0.2);
        let mut r = sample_recipe(1, "bg", c.duration_s());
        r.background = Some(BackgroundNoise { source: NoiseSource::Synthetic, snr_db: 15.0 });
        let out = augment_chunk(&c, &r).unwrap();
        assert!((peak(&out) - 0.8913).abs() < 0.001);
        r.background = Some(BackgroundNoise { source: NoiseSource::File("n.wav".into()), snr_db: 15.0 });
        assert!(matches!(augment_chunk(&c, &r), Err(AugmentError::MissingNoise(_))));
        let noise = sine(3000.0, 1.0, 0.5);
        assert!(augment_chunk_with_noise(&c, &r, Some(&noise)).is_ok());
    }

    #[test]
    fn augment_chunk_silent_input_unchanged() {
        let c = AudioClip::silence(SR as usize * 3, SR).unwrap();
        let mut r = sample_recipe(2, "s", 3.0);
        if let Effect::CoveredMic(p) = &mut r.effect {
            p.noise_level_dbfs = None;
        }
        assert_eq!(augment_chunk(&c, &r).unwrap(), c);
    }
}
