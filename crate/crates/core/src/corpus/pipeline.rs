use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boundary::{
    audio_tail, candidate_list, null_nonspeech, realign, select_boundary, BoundaryAction, BoundaryDecision,
    DEFAULT_FUZZY_THRESHOLD, DEFAULT_TAIL_S,
};
use super::chunks::{parse_chunks, SubtitleChunk};
use super::manifest::{CorpusSummary, ManifestEntry, Split, DEFAULT_SPLIT_RATIO};
use super::provider::EndpointProvider;
use super::script::{filter_language, LanguageDecision};
use super::CorpusError;
use crate::audio::{read_wav, AudioClip};

/// One subtitle document and the recording it describes.
#[derive(Debug, Clone)]
pub struct SourceInput {
    pub source_id: String,
    pub chunks_json: String,
    pub audio_path: PathBuf,
}

/// Non-speech `(start_s, end_s)` zones per source id.
pub type NonspeechZones = BTreeMap<String, Vec<(f64, f64)>>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusOptions {
    pub fuzzy_threshold: f64,
    pub tail_s: f64,
    pub split_ratio: f64,
    pub master_seed: u64,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            fuzzy_threshold: DEFAULT_FUZZY_THRESHOLD,
            tail_s: DEFAULT_TAIL_S,
            split_ratio: DEFAULT_SPLIT_RATIO,
            master_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusBuild {
    pub entries: Vec<ManifestEntry>,
    pub decisions: Vec<BoundaryDecision>,
    pub summary: CorpusSummary,
}

struct SourceOutcome {
    entries: Vec<ManifestEntry>,
    decisions: Vec<BoundaryDecision>,
    summary: CorpusSummary,
}

fn replace_devanagari(
    chunk: &SubtitleChunk,
    positions: &[usize],
    provider: &dyn EndpointProvider,
) -> Option<SubtitleChunk> {
    let mut words: Vec<String> = chunk.words().into_iter().map(str::to_owned).collect();
    match provider.replace_words(&chunk.chunk_id, &words, positions) {
        Ok(Some(repl)) => {
            for (&p, w) in positions.iter().zip(repl) {
                words[p] = w;
            }
            let mut out = chunk.clone();
            out.text = Some(words.join(" "));
            Some(out)
        }
        Ok(None) => {
            log::info!("{}: no replacement for Devanagari words, dropping", chunk.chunk_id);
            None
        }
        Err(e) => {
            log::warn!("{}: replacement failed ({e}), dropping", chunk.chunk_id);
            None
        }
    }
}

fn process_source(
    source: &SourceInput,
    audio: &AudioClip,
    chunks: Vec<SubtitleChunk>,
    provider: &dyn EndpointProvider,
    zones: &[(f64, f64)],
    opts: &CorpusOptions,
) -> Result<SourceOutcome, CorpusError> {
    let mut summary = CorpusSummary::default();
    let mut kept = Vec::with_capacity(chunks.len());
    for chunk in chunks {
        if chunk.end_s() * f64::from(audio.sample_rate_hz()) > audio.len() as f64 + 0.5 {
            log::warn!("{}: extends past the end of {}", chunk.chunk_id, source.audio_path.display());
            summary.skipped_out_of_range += 1;
            continue;
        }
        match filter_language(&chunk) {
            LanguageDecision::Keep => kept.push(chunk),
            LanguageDecision::Drop => summary.dropped += 1,
            LanguageDecision::NeedsReplacement(positions) => match replace_devanagari(&chunk, &positions, provider) {
                Some(c) => {
                    summary.replaced += 1;
                    kept.push(c);
                }
                None => summary.dropped += 1,
            },
        }
    }

    // Boundary validation between each speech chunk and the chunk after it.
    let pairs: Vec<usize> = (0..kept.len().saturating_sub(1)).filter(|&i| kept[i].text.is_some()).collect();
    let decisions: Vec<BoundaryDecision> = pairs
        .par_iter()
        .map(|&i| {
            let (cur, next) = (&kept[i], &kept[i + 1]);
            let candidates = candidate_list(cur, Some(next))?;
            let tail = audio_tail(audio, cur, opts.tail_s)?;
            let predicted = provider.predict(&cur.chunk_id, &tail).unwrap_or_else(|e| {
                log::warn!("{}: endpoint prediction failed ({e})", cur.chunk_id);
                Vec::new()
            });
            select_boundary(&cur.chunk_id, &predicted, &candidates, opts.fuzzy_threshold)
        })
        .collect::<Result<_, _>>()?;
    summary.realigned = decisions
        .iter()
        .filter(|d| matches!(d.action, BoundaryAction::PullFromNext(k) | BoundaryAction::PushToNext(k) if k > 0))
        .count();

    let realigned = realign(&kept, &decisions)?;
    summary.unvalidated = realigned.excluded.len();
    let audio_path = source.audio_path.display().to_string();
    let entries: Vec<ManifestEntry> = realigned
        .chunks
        .iter()
        .filter(|c| !realigned.excluded.contains(&c.chunk_id))
        .map(|c| {
            let c = null_nonspeech(c, zones);
            ManifestEntry {
                split: Split::assign(opts.master_seed, &c.chunk_id, opts.split_ratio),
                chunk_id: c.chunk_id,
                audio_path: audio_path.clone(),
                offset_s: c.start_s,
                duration_s: c.duration_s,
                transcript: c.text,
                augmented: false,
                recipe: None,
                sample_rate_hz: audio.sample_rate_hz(),
            }
        })
        .collect();
    Ok(SourceOutcome { entries, decisions, summary })
}

/// Parse, filter, validate boundaries, null non-speech and split, for every
/// source. A malformed chunk document aborts the build; a missing or
/// unreadable recording skips (and counts) that source's chunks. Sources are
/// processed in parallel on the current rayon pool; the output is sorted by
/// chunk id either way.
pub fn build_corpus(
    sources: &[SourceInput],
    provider: &dyn EndpointProvider,
    zones: &NonspeechZones,
    opts: &CorpusOptions,
) -> Result<CorpusBuild, CorpusError> {
    let parsed: Vec<Vec<SubtitleChunk>> = sources
        .iter()
        .map(|s| parse_chunks(&s.chunks_json, &s.source_id))
        .collect::<Result<_, _>>()?;

    let mut summary = CorpusSummary {
        sources: sources.len(),
        chunks: parsed.iter().map(Vec::len).sum(),
        ..Default::default()
    };
    let outcomes: Vec<SourceOutcome> = sources
        .par_iter()
        .zip(parsed)
        .map(|(source, chunks)| {
            let n = chunks.len();
            let audio = match read_wav(&source.audio_path) {
                Ok(a) => a,
                Err(e) => {
                    log::warn!("{}: skipping {n} chunks ({e})", source.source_id);
                    let summary = CorpusSummary { skipped_missing_audio: n, ..Default::default() };
                    return Ok(SourceOutcome { entries: vec![], decisions: vec![], summary });
                }
            };
            let empty = Vec::new();
            let z = zones.get(&source.source_id).unwrap_or(&empty);
            process_source(source, &audio, chunks, provider, z, opts)
        })
        .collect::<Result<_, CorpusError>>()?;

    let mut entries = Vec::new();
    let mut decisions = Vec::new();
    for o in outcomes {
        let s = o.summary;
        summary.replaced += s.replaced;
        summary.dropped += s.dropped;
        summary.unvalidated += s.unvalidated;
        summary.realigned += s.realigned;
        summary.skipped_missing_audio += s.skipped_missing_audio;
        summary.skipped_out_of_range += s.skipped_out_of_range;
        entries.extend(o.entries);
        decisions.extend(o.decisions);
    }
    entries.sort_by(|a, b| a.chunk_id.cmp(&b.chunk_id));
    decisions.sort_by(|a, b| a.chunk_id.cmp(&b.chunk_id));
    summary.kept = entries.len();
    summary.nonspeech = entries.iter().filter(|e| e.transcript.is_none()).count();
    summary.train = entries.iter().filter(|e| e.split == Split::Train).count();
    summary.val = summary.kept - summary.train;
    Ok(CorpusBuild { entries, decisions, summary })
}
