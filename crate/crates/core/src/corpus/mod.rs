//! Corpus construction from timestamped subtitle chunks: script filtering,
//! boundary validation against an endpoint predictor, non-speech nulling,
//! train/val split and JSONL manifests.

mod boundary;
mod chunks;
mod gestalt;
mod manifest;
mod pipeline;
mod provider;
mod script;

pub use boundary::{
    audio_tail, candidate_list, null_nonspeech, realign, select_boundary, BoundaryAction, BoundaryDecision,
    Candidate, CandidateOrigin, Realigned, DEFAULT_FUZZY_THRESHOLD, DEFAULT_TAIL_S, NONSPEECH_COVERAGE,
};
pub use chunks::{parse_chunks, words, SubtitleChunk};
pub use gestalt::{longest_match, matching_characters, similarity_ratio};
pub use manifest::{
    manifest_to_string, parse_manifest, read_manifest, split_train_val, write_manifest, CorpusSummary, ManifestEntry, Split, DEFAULT_SPLIT_RATIO,
};
pub use pipeline::{build_corpus, CorpusBuild, CorpusOptions, NonspeechZones, SourceInput};
pub use provider::{EndpointProvider, FileProvider, RemoteConfig, RemoteProvider, ENV_API_KEY, ENV_ENDPOINT_URL};
pub use script::{classify_token_script, filter_language, LanguageDecision, ScriptClass};

use thiserror::Error;

use crate::audio::AudioError;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("malformed chunk document: {0}")]
    MalformedDocument(String),
    #[error("negative time in chunk {index}: {field} = {value}")]
    NegativeTime { index: usize, field: &'static str, value: f64 },
    #[error("chunk {chunk_id} spans {start_s}..{end_s} s but audio lasts {audio_s} s")]
    OutOfRange { chunk_id: String, start_s: f64, end_s: f64, audio_s: f64 },
    #[error("chunk {0} has no words")]
    EmptyTranscript(String),
    #[error("inconsistent decision for {chunk_id}: {reason}")]
    InconsistentDecision { chunk_id: String, reason: String },
    #[error("malformed manifest line {line}: {reason}")]
    MalformedManifest { line: usize, reason: String },
    #[error("endpoint: {0}")]
    Endpoint(String),
    #[error("I/O failure on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Audio(#[from] AudioError),
}

impl CorpusError {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CorpusError::Io { path: path.as_ref().display().to_string(), source }
    }
}
