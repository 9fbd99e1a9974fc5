use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CorpusError;
use crate::augment::AugmentRecipe;
use crate::hash::{item_hash, unit_interval};

pub const DEFAULT_SPLIT_RATIO: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
}

impl Split {
    /// Train iff `item_hash(master_seed, chunk_id) / 2^64 < ratio`.
    pub fn assign(master_seed: u64, chunk_id: &str, ratio: f64) -> Split {
        if unit_interval(item_hash(master_seed, chunk_id)) < ratio {
            Split::Train
        } else {
            Split::Val
        }
    }
}

/// One manifest line. `transcript == None` marks non-speech.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub chunk_id: String,
    pub audio_path: String,
    pub offset_s: f64,
    pub duration_s: f64,
    pub transcript: Option<String>,
    pub split: Split,
    pub augmented: bool,
    pub recipe: Option<AugmentRecipe>,
    pub sample_rate_hz: u32,
}

/// Assigns each entry's split from its chunk id alone, so the result does not
/// depend on entry order.
pub fn split_train_val(mut entries: Vec<ManifestEntry>, ratio: f64, master_seed: u64) -> Vec<ManifestEntry> {
    for e in &mut entries {
        e.split = Split::assign(master_seed, &e.chunk_id, ratio);
    }
    entries
}

/// JSONL text with entries in chunk-id order.
pub fn manifest_to_string(entries: &[ManifestEntry]) -> String {
    let mut sorted: Vec<&ManifestEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| a.chunk_id.cmp(&b.chunk_id));
    let mut out = String::new();
    for e in sorted {
        out.push_str(&serde_json::to_string(e).expect("manifest entries always serialise"));
        out.push('\n');
    }
    out
}

pub fn write_manifest(path: impl AsRef<Path>, entries: &[ManifestEntry]) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let mut f = std::fs::File::create(path).map_err(|e| CorpusError::io(path, e))?;
    f.write_all(manifest_to_string(entries).as_bytes()).map_err(|e| CorpusError::io(path, e))
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, CorpusError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let e: ManifestEntry = serde_json::from_str(l)
                .map_err(|err| CorpusError::MalformedManifest { line: i + 1, reason: err.to_string() })?;
            if !(e.duration_s > 0.0) {
                return Err(CorpusError::MalformedManifest { line: i + 1, reason: "duration_s must be positive".into() });
            }
            Ok(e)
        })
        .collect()
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>, CorpusError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
    parse_manifest(&text)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub sources: usize,
    pub chunks: usize,
    pub kept: usize,
    pub replaced: usize,
    pub dropped: usize,
    pub unvalidated: usize,
    pub realigned: usize,
    pub nonspeech: usize,
    pub skipped_missing_audio: usize,
    pub skipped_out_of_range: usize,
    pub augmented: usize,
    pub train: usize,
    pub val: usize,
}
