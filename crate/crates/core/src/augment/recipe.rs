use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hash::item_hash;

pub const DEFAULT_CROSSFADE_S: f64 = 0.05;
pub const DEFAULT_SNR_RANGE_DB: Range = Range::new(10.0, 25.0);

/// Inclusive `[lo, hi]` range; a degenerate range always yields `lo`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn fixed(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    fn draw(&self, rng: &mut impl Rng) -> f64 {
        if self.hi <= self.lo {
            self.lo
        } else {
            rng.random_range(self.lo..=self.hi)
        }
    }

    pub fn within(&self, outer: &Range) -> bool {
        self.lo <= self.hi && self.lo >= outer.lo && self.hi <= outer.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveredMicParams {
    pub fc_hz: f64,
    pub slope_p: f64,
    /// Shelf boost at DC, fading to unity at 240 Hz.
    pub lf_boost_db: f64,
    pub ripple_period_hz: f64,
    pub ripple_depth: f64,
    /// Peak level of the added shaped noise; `None` disables it.
    pub noise_level_dbfs: Option<f64>,
    pub clip_drive: f64,
}

impl CoveredMicParams {
    pub const SHELF_CORNER_HZ: f64 = 240.0;

    pub fn validate(&self) -> Result<(), String> {
        let checks = [
            (self.fc_hz > 0.0, "fc_hz must be positive"),
            (self.slope_p > 0.0, "slope_p must be positive"),
            (self.lf_boost_db >= 0.0, "lf_boost_db must be non-negative"),
            (self.ripple_period_hz > 0.0, "ripple_period_hz must be positive"),
            ((0.0..=1.0).contains(&self.ripple_depth), "ripple_depth must lie in [0, 1]"),
            (self.clip_drive > 0.0, "clip_drive must be positive"),
            (
                self.noise_level_dbfs.is_none_or(|l| l.is_finite() && l <= 0.0),
                "noise_level_dbfs must be a finite level <= 0",
            ),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err((*msg).to_string()),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnderwaterParams {
    pub fc_hz: f64,
    pub slope_p: f64,
    pub scoop_db: f64,
    pub scoop_center_hz: f64,
    pub scoop_q: f64,
    pub wobble_hz: f64,
    pub wobble_depth: f64,
}

impl UnderwaterParams {
    pub fn validate(&self) -> Result<(), String> {
        let checks = [
            (self.fc_hz > 0.0, "fc_hz must be positive"),
            (self.slope_p > 0.0, "slope_p must be positive"),
            (self.scoop_db <= 0.0, "scoop_db must be <= 0"),
            (self.scoop_center_hz > 0.0, "scoop_center_hz must be positive"),
            (self.scoop_q > 0.0, "scoop_q must be positive"),
            (self.wobble_hz > 0.0, "wobble_hz must be positive"),
            ((0.0..=1.0).contains(&self.wobble_depth), "wobble_depth must lie in [0, 1]"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err((*msg).to_string()),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradedZone {
    pub start_s: f64,
    pub end_s: f64,
}

impl DegradedZone {
    pub fn len_s(&self) -> f64 {
        self.end_s - self.start_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Effect {
    CoveredMic(CoveredMicParams),
    Underwater(UnderwaterParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EffectKind {
    CoveredMic,
    Underwater,
}

impl Effect {
    pub fn kind(&self) -> EffectKind {
        match self {
            Effect::CoveredMic(_) => EffectKind::CoveredMic,
            Effect::Underwater(_) => EffectKind::Underwater,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "name", rename_all = "snake_case")]
pub enum NoiseSource {
    /// Shaped noise generated from the recipe seed.
    Synthetic,
    /// A WAV file from the configured noise directory (file name only).
    File(String),
}

/// Background noise mixed into the whole chunk before the zone effect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackgroundNoise {
    pub source: NoiseSource,
    pub snr_db: f64,
}

/// Fully resolved degradation plan; reproducible from `(master_seed, item_id, duration)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentRecipe {
    pub effect: Effect,
    pub zone: DegradedZone,
    pub seed: u64,
    pub crossfade_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background: Option<BackgroundNoise>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoveredMicRanges {
    pub fc_hz: Range,
    pub slope_p: Range,
    pub lf_boost_db: Range,
    pub ripple_period_hz: Range,
    pub ripple_depth: Range,
    pub noise_level_dbfs: Range,
    pub clip_drive: Range,
}

impl Default for CoveredMicRanges {
    fn default() -> Self {
        Self {
            fc_hz: Range::new(600.0, 2000.0),
            slope_p: Range::new(4.0, 10.0),
            lf_boost_db: Range::new(0.0, 8.0),
            ripple_period_hz: Range::fixed(850.0),
            ripple_depth: Range::fixed(0.15),
            noise_level_dbfs: Range::new(-48.0, -35.0),
            clip_drive: Range::fixed(1.8),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UnderwaterRanges {
    pub fc_hz: Range,
    pub slope_p: Range,
    pub scoop_db: Range,
    pub scoop_center_hz: Range,
    pub scoop_q: Range,
    pub wobble_hz: Range,
    pub wobble_depth: Range,
}

impl Default for UnderwaterRanges {
    fn default() -> Self {
        Self {
            fc_hz: Range::new(800.0, 1200.0),
            slope_p: Range::fixed(8.0),
            scoop_db: Range::new(-14.0, -4.0),
            scoop_center_hz: Range::fixed(1500.0),
            scoop_q: Range::fixed(2.2),
            wobble_hz: Range::fixed(0.35),
            wobble_depth: Range::fixed(0.3),
        }
    }
}

/// Sampling ranges for every recipe field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentRanges {
    pub covered_mic: CoveredMicRanges,
    pub underwater: UnderwaterRanges,
    pub zone_s: Range,
    pub crossfade_s: f64,
}

impl Default for AugmentRanges {
    fn default() -> Self {
        Self {
            covered_mic: CoveredMicRanges::default(),
            underwater: UnderwaterRanges::default(),
            zone_s: Range::new(5.0, 10.0),
            crossfade_s: DEFAULT_CROSSFADE_S,
        }
    }
}

impl AugmentRanges {
    /// Names of ranges that leave the published bounds
    /// (ripple and wobble depth may take any value in `[0, 1]`).
    pub fn out_of_bounds(&self) -> Vec<&'static str> {
        let c = &self.covered_mic;
        let u = &self.underwater;
        let reference = AugmentRanges::default();
        let rc = &reference.covered_mic;
        let ru = &reference.underwater;
        let unit = Range::new(0.0, 1.0);
        [
            ("covered_mic.fc_hz", c.fc_hz.within(&rc.fc_hz)),
            ("covered_mic.slope_p", c.slope_p.within(&rc.slope_p)),
            ("covered_mic.lf_boost_db", c.lf_boost_db.within(&rc.lf_boost_db)),
            ("covered_mic.ripple_period_hz", c.ripple_period_hz.within(&rc.ripple_period_hz)),
            ("covered_mic.ripple_depth", c.ripple_depth.within(&unit)),
            ("covered_mic.noise_level_dbfs", c.noise_level_dbfs.within(&rc.noise_level_dbfs)),
            ("covered_mic.clip_drive", c.clip_drive.within(&rc.clip_drive)),
            ("underwater.fc_hz", u.fc_hz.within(&ru.fc_hz)),
            ("underwater.slope_p", u.slope_p.within(&ru.slope_p)),
            ("underwater.scoop_db", u.scoop_db.within(&ru.scoop_db)),
            ("underwater.scoop_center_hz", u.scoop_center_hz.within(&ru.scoop_center_hz)),
            ("underwater.scoop_q", u.scoop_q.within(&ru.scoop_q)),
            ("underwater.wobble_hz", u.wobble_hz.within(&ru.wobble_hz)),
            ("underwater.wobble_depth", u.wobble_depth.within(&unit)),
            ("zone_s", self.zone_s.within(&reference.zone_s)),
        ]
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| name)
        .collect()
    }
}

/// [`sample_recipe_with`] using the default ranges.
pub fn sample_recipe(master_seed: u64, item_id: &str, clip_duration_s: f64) -> AugmentRecipe {
    sample_recipe_with(&AugmentRanges::default(), master_seed, item_id, clip_duration_s)
}

/// Draws a recipe from a generator seeded by `item_hash(master_seed, item_id)`.
///
/// The effect is a fair coin flip; every parameter is uniform over its range.
/// Clips shorter than the minimum zone length are degraded in full.
pub fn sample_recipe_with(
    ranges: &AugmentRanges,
    master_seed: u64,
    item_id: &str,
    clip_duration_s: f64,
) -> AugmentRecipe {
    let seed = item_hash(master_seed, item_id);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let effect = if rng.random_bool(0.5) {
        let r = &ranges.covered_mic;
        Effect::CoveredMic(CoveredMicParams {
            fc_hz: r.fc_hz.draw(&mut rng),
            slope_p: r.slope_p.draw(&mut rng),
            lf_boost_db: r.lf_boost_db.draw(&mut rng),
            ripple_period_hz: r.ripple_period_hz.draw(&mut rng),
            ripple_depth: r.ripple_depth.draw(&mut rng),
            noise_level_dbfs: Some(r.noise_level_dbfs.draw(&mut rng)),
            clip_drive: r.clip_drive.draw(&mut rng),
        })
    } else {
        let r = &ranges.underwater;
        Effect::Underwater(UnderwaterParams {
            fc_hz: r.fc_hz.draw(&mut rng),
            slope_p: r.slope_p.draw(&mut rng),
            scoop_db: r.scoop_db.draw(&mut rng),
            scoop_center_hz: r.scoop_center_hz.draw(&mut rng),
            scoop_q: r.scoop_q.draw(&mut rng),
            wobble_hz: r.wobble_hz.draw(&mut rng),
            wobble_depth: r.wobble_depth.draw(&mut rng),
        })
    };
    let duration = clip_duration_s.max(0.0);
    let zone = if duration < ranges.zone_s.lo {
        DegradedZone {
            start_s: 0.0,
            end_s: duration,
        }
    } else {
        let len = Range::new(ranges.zone_s.lo, ranges.zone_s.hi.min(duration)).draw(&mut rng);
        let start = Range::new(0.0, duration - len).draw(&mut rng);
        DegradedZone {
            start_s: start,
            end_s: (start + len).min(duration),
        }
    };
    AugmentRecipe {
        effect,
        zone,
        seed,
        crossfade_s: ranges.crossfade_s,
        background: None,
    }
}

/// Background noise for an item, drawn from its own stream so that adding
/// noise leaves the effect and zone draws untouched. Picks one of
/// `noise_files` uniformly, or synthetic noise when the list is empty.
pub fn sample_background(
    master_seed: u64,
    item_id: &str,
    snr_range_db: Range,
    noise_files: &[String],
) -> BackgroundNoise {
    let mut rng = ChaCha8Rng::seed_from_u64(item_hash(master_seed, &format!("{item_id}#background")));
    let snr_db = snr_range_db.draw(&mut rng);
    let source = if noise_files.is_empty() {
        NoiseSource::Synthetic
    } else {
        NoiseSource::File(noise_files[rng.random_range(0..noise_files.len())].clone())
    };
    BackgroundNoise { source, snr_db }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn background_draws() {
        let files = vec!["a.wav".to_owned(), "b.wav".to_owned()];
        let mut seen = std::collections::BTreeSet::new();
        for i in 0..200 {
            let b = sample_background(5, &format!("it{i}"), DEFAULT_SNR_RANGE_DB, &files);
            assert!((10.0..=25.0).contains(&b.snr_db));
            if let NoiseSource::File(f) = &b.source {
                seen.insert(f.clone());
            }
            assert_eq!(b, sample_background(5, &format!("it{i}"), DEFAULT_SNR_RANGE_DB, &files));
        }
        assert_eq!(seen.len(), 2);
        assert_eq!(sample_background(5, "x", DEFAULT_SNR_RANGE_DB, &[]).source, NoiseSource::Synthetic);
    }

    #[test]
    fn recipes_are_deterministic() {
        assert_eq!(sample_recipe(9, "a/b_0001", 12.5), sample_recipe(9, "a/b_0001", 12.5));
        assert_ne!(sample_recipe(9, "a/b_0001", 12.5), sample_recipe(9, "a/b_0002", 12.5));
    }

    #[test]
    fn short_clip_zone_is_whole_clip() {
        let r = sample_recipe(1, "x", 4.0);
        assert_eq!(r.zone, DegradedZone { start_s: 0.0, end_s: 4.0 });
    }

    #[test]
    fn zone_lengths_and_placement() {
        for i in 0..2000 {
            let dur = 5.0 + (i % 50) as f64 * 0.7;
            let r = sample_recipe(3, &format!("item{i}"), dur);
            let len = r.zone.len_s();
            assert!((5.0 - 1e-9..=10.0 + 1e-9).contains(&len), "{len}");
            assert!(r.zone.start_s >= 0.0 && r.zone.end_s <= dur + 1e-12);
        }
    }

    #[test]
    fn parameters_stay_in_range() {
        let d = AugmentRanges::default();
        for i in 0..2000 {
            match sample_recipe(11, &i.to_string(), 20.0).effect {
                Effect::CoveredMic(p) => {
                    assert!((600.0..=2000.0).contains(&p.fc_hz));
                    assert!((4.0..=10.0).contains(&p.slope_p));
                    assert!((0.0..=8.0).contains(&p.lf_boost_db));
                    assert!((-48.0..=-35.0).contains(&p.noise_level_dbfs.unwrap()));
                    assert_eq!(p.ripple_period_hz, 850.0);
                    assert_eq!(p.ripple_depth, 0.15);
                    assert_eq!(p.clip_drive, 1.8);
                }
                Effect::Underwater(p) => {
                    assert!((800.0..=1200.0).contains(&p.fc_hz));
                    assert!((-14.0..=-4.0).contains(&p.scoop_db));
                    assert_eq!(p.slope_p, 8.0);
                    assert_eq!(p.scoop_center_hz, 1500.0);
                    assert_eq!(p.scoop_q, 2.2);
                    assert_eq!(p.wobble_hz, 0.35);
                    assert_eq!(p.wobble_depth, 0.3);
                }
            }
        }
        assert!(d.out_of_bounds().is_empty());
    }

    #[test]
    fn out_of_bounds_ranges_are_named() {
        let mut r = AugmentRanges::default();
        r.covered_mic.fc_hz = Range::new(300.0, 2000.0);
        r.underwater.wobble_depth = Range::fixed(0.8);
        assert_eq!(r.out_of_bounds(), vec!["covered_mic.fc_hz"]);
    }

    #[test]
    fn recipe_json_round_trip() {
        let mut r = sample_recipe(5, "chunk", 30.0);
        r.background = Some(BackgroundNoise {
            source: NoiseSource::File("cafe.wav".into()),
            snr_db: 17.5,
        });
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"kind\":"));
        let back: AugmentRecipe = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn param_validation() {
        let p = CoveredMicParams {
            fc_hz: 800.0,
            slope_p: 8.0,
            lf_boost_db: 0.0,
            ripple_period_hz: 850.0,
            ripple_depth: 0.0,
            noise_level_dbfs: None,
            clip_drive: 1.8,
        };
        assert!(p.validate().is_ok());
        assert!(CoveredMicParams { clip_drive: 0.0, ..p }.validate().is_err());
        assert!(CoveredMicParams { ripple_depth: 1.5, ..p }.validate().is_err());
        let u = UnderwaterParams {
            fc_hz: 1000.0,
            slope_p: 8.0,
            scoop_db: -10.0,
            scoop_center_hz: 1500.0,
            scoop_q: 2.2,
            wobble_hz: 0.35,
            wobble_depth: 0.3,
        };
        assert!(u.validate().is_ok());
        assert!(UnderwaterParams { scoop_db: 1.0, ..u }.validate().is_err());
        assert!(UnderwaterParams { scoop_q: 0.0, ..u }.validate().is_err());
    }
}
