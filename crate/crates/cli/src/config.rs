use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shobdosetu_core::augment::{AugmentRanges, Range, DEFAULT_SNR_RANGE_DB};
use shobdosetu_core::corpus::{RemoteConfig, DEFAULT_FUZZY_THRESHOLD, DEFAULT_SPLIT_RATIO, DEFAULT_TAIL_S};
use shobdosetu_core::diarpost::{ParamGrid, PostParams};

use crate::error::{CliError, CliResult};

/// Single JSON document; every field is optional and falls back to the
/// built-in default. Command-line flags override it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToolkitConfig {
    pub master_seed: u64,
    pub augment: AugmentRanges,
    /// Permit augmentation ranges outside the published bounds.
    pub allow_out_of_bounds: bool,
    pub noise_dir: Option<PathBuf>,
    pub snr_range_db: (f64, f64),
    pub split_ratio: f64,
    pub fuzzy_threshold: f64,
    pub tail_s: f64,
    pub collar_s: f64,
    pub strip_punctuation: bool,
    pub post: PostParams,
    pub grid: ParamGrid,
    pub endpoint: RemoteConfig,
}

impl Default for ToolkitConfig {
    fn default() -> Self {
        ToolkitConfig {
            master_seed: 0,
            augment: AugmentRanges::default(),
            allow_out_of_bounds: false,
            noise_dir: None,
            snr_range_db: (DEFAULT_SNR_RANGE_DB.lo, DEFAULT_SNR_RANGE_DB.hi),
            split_ratio: DEFAULT_SPLIT_RATIO,
            fuzzy_threshold: DEFAULT_FUZZY_THRESHOLD,
            tail_s: DEFAULT_TAIL_S,
            collar_s: 0.0,
            strip_punctuation: false,
            post: PostParams::default(),
            grid: ParamGrid::default(),
            endpoint: RemoteConfig::default(),
        }
    }
}

impl ToolkitConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("config {}: {e}", path.display())))
    }

    pub fn snr_range(&self) -> Range {
        Range::new(self.snr_range_db.0, self.snr_range_db.1)
    }

    /// Checks value constraints once flags have been applied.
    pub fn validate(&self) -> CliResult<()> {
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(CliError::semantic(format!("split_ratio must lie in (0, 1), got {}", self.split_ratio)));
        }
        if !(0.0..=1.0).contains(&self.fuzzy_threshold) {
            return Err(CliError::semantic(format!("fuzzy_threshold must lie in [0, 1], got {}", self.fuzzy_threshold)));
        }
        if !(self.collar_s >= 0.0) || !(self.tail_s > 0.0) {
            return Err(CliError::semantic("collar_s must be >= 0 and tail_s > 0"));
        }
        if !self.post.is_valid() {
            return Err(CliError::semantic("post-processing parameters must be finite and >= 0"));
        }
        let (lo, hi) = self.snr_range_db;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(CliError::semantic(format!("snr_range_db must be an ordered pair, got ({lo}, {hi})")));
        }
        let outside = self.augment.out_of_bounds();
        if !outside.is_empty() && !self.allow_out_of_bounds {
            return Err(CliError::semantic(format!(
                "augmentation ranges outside the published bounds: {} (set allow_out_of_bounds to override)",
                outside.join(", ")
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_default() {
        let c: ToolkitConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, ToolkitConfig::default());
        c.validate().unwrap();
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<ToolkitConfig>(r#"{"split_ratoi": 0.5}"#).is_err());
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let c: ToolkitConfig = serde_json::from_str(
            r#"{"master_seed": 7, "augment": {"covered_mic": {"fc_hz": {"lo": 700, "hi": 900}}},
                "grid": {"min_duration_off": [0, 0.5]}, "endpoint": {"timeout_s": 3}}"#,
        )
        .unwrap();
        assert_eq!(c.master_seed, 7);
        assert_eq!(c.augment.covered_mic.fc_hz, Range::new(700.0, 900.0));
        assert_eq!(c.augment.covered_mic.slope_p, Range::new(4.0, 10.0));
        assert_eq!(c.grid.len(), 2);
        assert_eq!(c.endpoint.timeout_s, 3.0);
        assert_eq!(c.endpoint.retries, 3);
        c.validate().unwrap();
    }

    #[test]
    fn validation_failures() {
        let mut c = ToolkitConfig { split_ratio: 1.0, ..Default::default() };
        assert!(matches!(c.validate(), Err(CliError::Semantic(_))));
        c.split_ratio = 0.9;
        c.augment.covered_mic.fc_hz = Range::new(100.0, 900.0);
        assert!(c.validate().is_err());
        c.allow_out_of_bounds = true;
        c.validate().unwrap();
    }
}
