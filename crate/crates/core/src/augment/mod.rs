//! Zone-limited spectral degradations: covered microphone and underwater.
//!
//! Both effects work on a 5–10 s zone of a chunk. The zone is processed in the
//! STFT domain with per-bin magnitude gains, blended back with linear ramps at
//! its edges, and the whole chunk is finally peak-normalised to −1 dBFS.

mod curves;
mod effects;
mod recipe;

pub use curves::{lowpass_gain, ripple_gain, scoop_gain, shelf_gain, wobble_gain};
pub use effects::{
    apply_covered_mic, apply_underwater, augment_chunk, augment_chunk_with_noise,
    mix_background_noise, shaped_noise, soft_clip, OUTPUT_PEAK_DBFS,
};
pub use recipe::{
    sample_background, sample_recipe, sample_recipe_with, AugmentRanges, AugmentRecipe, BackgroundNoise,
    CoveredMicParams, CoveredMicRanges, DegradedZone, Effect, EffectKind, NoiseSource, Range,
    UnderwaterParams, UnderwaterRanges, DEFAULT_CROSSFADE_S, DEFAULT_SNR_RANGE_DB,
};

use thiserror::Error;

use crate::audio::AudioError;

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("zone [{start_s}, {end_s}] s is outside the {duration_s} s clip")]
    ZoneOutOfRange {
        start_s: f64,
        end_s: f64,
        duration_s: f64,
    },
    #[error("invalid effect parameter: {0}")]
    InvalidParams(String),
    #[error("background noise is silent")]
    SilentNoise,
    #[error("recipe needs background noise from {0:?} but none was supplied")]
    MissingNoise(String),
    #[error(transparent)]
    Audio(#[from] AudioError),
}
