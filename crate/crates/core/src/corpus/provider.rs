use std::collections::HashMap;
use std::path::Path;
use std::time::Duration;

use base64::Engine;
use serde::{Deserialize, Serialize};

use super::CorpusError;
use crate::audio::{encode_wav, peak, AudioClip, WavEncoding};

pub const ENV_ENDPOINT_URL: &str = "SHOBDOSETU_ENDPOINT_URL";
pub const ENV_API_KEY: &str = "SHOBDOSETU_ENDPOINT_API_KEY";

/// Source of endpoint words (the last words spoken in a chunk's audio tail)
/// and of replacements for Devanagari words.
pub trait EndpointProvider: Send + Sync {
    /// Words spoken at the end of `tail`, in order. Silent audio gives `[]`.
    fn predict(&self, chunk_id: &str, tail: &AudioClip) -> Result<Vec<String>, CorpusError>;

    /// One replacement word per entry of `positions`, or `None` when the
    /// provider has nothing for this chunk.
    fn replace_words(
        &self,
        chunk_id: &str,
        words: &[String],
        positions: &[usize],
    ) -> Result<Option<Vec<String>>, CorpusError>;
}

#[derive(Debug, Clone, Deserialize)]
struct FileRecord {
    chunk_id: String,
    words: Vec<String>,
    #[serde(default)]
    replacements: Option<Vec<String>>,
}

/// Lookup table keyed by chunk id, read from JSONL lines
/// `{"chunk_id": .., "words": [..], "replacements": [..]}` (`replacements`
/// optional). Later lines override earlier ones.
#[derive(Debug, Clone, Default)]
pub struct FileProvider {
    records: HashMap<String, FileRecord>,
}

impl FileProvider {
    pub fn from_jsonl(text: &str) -> Result<Self, CorpusError> {
        let mut records = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: FileRecord = serde_json::from_str(line)
                .map_err(|e| CorpusError::Endpoint(format!("predictions line {}: {e}", i + 1)))?;
            records.insert(rec.chunk_id.clone(), rec);
        }
        Ok(FileProvider { records })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| CorpusError::io(path.as_ref(), e))?;
        Self::from_jsonl(&text)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl EndpointProvider for FileProvider {
    fn predict(&self, chunk_id: &str, _tail: &AudioClip) -> Result<Vec<String>, CorpusError> {
        Ok(self.records.get(chunk_id).map(|r| r.words.clone()).unwrap_or_default())
    }

    fn replace_words(
        &self,
        chunk_id: &str,
        _words: &[String],
        positions: &[usize],
    ) -> Result<Option<Vec<String>>, CorpusError> {
        match self.records.get(chunk_id).and_then(|r| r.replacements.as_ref()) {
            None => Ok(None),
            Some(r) if r.len() == positions.len() => Ok(Some(r.clone())),
            Some(r) => Err(CorpusError::Endpoint(format!(
                "{chunk_id}: {} replacements for {} positions",
                r.len(),
                positions.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteConfig {
    pub url: Option<String>,
    #[serde(skip)]
    pub api_key: Option<String>,
    pub timeout_s: f64,
    pub max_inflight: usize,
    pub retries: u32,
    pub backoff_s: f64,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig { url: None, api_key: None, timeout_s: 30.0, max_inflight: 4, retries: 3, backoff_s: 0.5 }
    }
}

impl RemoteConfig {
    /// Fills the URL (when unset) and the API key from the environment.
    pub fn with_env(mut self) -> Self {
        if self.url.is_none() {
            self.url = std::env::var(ENV_ENDPOINT_URL).ok().filter(|s| !s.is_empty());
        }
        if self.api_key.is_none() {
            self.api_key = std::env::var(ENV_API_KEY).ok().filter(|s| !s.is_empty());
        }
        self
    }
}

#[derive(Serialize)]
#[serde(tag = "task", rename_all = "snake_case")]
enum RemoteRequest<'a> {
    EndpointWords { chunk_id: &'a str, sample_rate_hz: u32, audio_wav_base64: String },
    ReplaceWords { chunk_id: &'a str, words: &'a [String], positions: &'a [usize] },
}

#[derive(Deserialize)]
struct WordsResponse {
    #[serde(default)]
    words: Vec<String>,
}

#[derive(Deserialize)]
struct ReplaceResponse {
    #[serde(default)]
    replacements: Option<Vec<String>>,
}

/// JSON-over-HTTP predictor. Every call is a POST of
/// `{"task": "endpoint_words", "chunk_id", "sample_rate_hz", "audio_wav_base64"}`
/// (answered by `{"words": [..]}`) or
/// `{"task": "replace_words", "chunk_id", "words", "positions"}`
/// (answered by `{"replacements": [..] | null}`), with a bearer API key.
/// Transport failures, 429 and 5xx are retried with exponential backoff.
pub struct RemoteProvider {
    agent: ureq::Agent,
    url: String,
    api_key: Option<String>,
    retries: u32,
    backoff: Duration,
}

impl RemoteProvider {
    pub fn new(config: &RemoteConfig) -> Result<Self, CorpusError> {
        let url = config
            .url
            .clone()
            .ok_or_else(|| CorpusError::Endpoint(format!("no endpoint URL (set {ENV_ENDPOINT_URL})")))?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(config.timeout_s.max(0.001))))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(RemoteProvider {
            agent,
            url,
            api_key: config.api_key.clone(),
            retries: config.retries,
            backoff: Duration::from_secs_f64(config.backoff_s.max(0.0)),
        })
    }

    fn post(&self, body: &RemoteRequest) -> Result<String, CorpusError> {
        let payload = serde_json::to_string(body).map_err(|e| CorpusError::Endpoint(e.to_string()))?;
        let mut last_err = String::new();
        for attempt in 0..=self.retries {
            if attempt > 0 {
                std::thread::sleep(self.backoff * 2u32.pow(attempt - 1));
            }
            let mut req = self.agent.post(&self.url).header("Content-Type", "application/json");
            if let Some(key) = &self.api_key {
                req = req.header("Authorization", format!("Bearer {key}"));
            }
            match req.send(payload.as_str()) {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    let text = resp.body_mut().read_to_string().unwrap_or_default();
                    if (200..300).contains(&status) {
                        return Ok(text);
                    }
                    last_err = format!("HTTP {status}: {}", text.chars().take(200).collect::<String>());
                    if status != 429 && status < 500 {
                        break;
                    }
                }
                Err(e) => last_err = e.to_string(),
            }
            log::warn!("endpoint attempt {} failed: {last_err}", attempt + 1);
        }
        Err(CorpusError::Endpoint(last_err))
    }
}

impl EndpointProvider for RemoteProvider {
    fn predict(&self, chunk_id: &str, tail: &AudioClip) -> Result<Vec<String>, CorpusError> {
        if tail.is_empty() || peak(tail) == 0.0 {
            return Ok(Vec::new());
        }
        let (wav, _) = encode_wav(tail, WavEncoding::Pcm16)?;
        let body = RemoteRequest::EndpointWords {
            chunk_id,
            sample_rate_hz: tail.sample_rate_hz(),
            audio_wav_base64: base64::engine::general_purpose::STANDARD.encode(wav),
        };
        let text = self.post(&body)?;
        let resp: WordsResponse = serde_json::from_str(&text).map_err(|e| CorpusError::Endpoint(e.to_string()))?;
        Ok(resp.words)
    }

    fn replace_words(
        &self,
        chunk_id: &str,
        words: &[String],
        positions: &[usize],
    ) -> Result<Option<Vec<String>>, CorpusError> {
        let text = self.post(&RemoteRequest::ReplaceWords { chunk_id, words, positions })?;
        let resp: ReplaceResponse = serde_json::from_str(&text).map_err(|e| CorpusError::Endpoint(e.to_string()))?;
        match resp.replacements {
            Some(r) if r.len() != positions.len() => Err(CorpusError::Endpoint(format!(
                "{chunk_id}: {} replacements for {} positions",
                r.len(),
                positions.len()
            ))),
            other => Ok(other),
        }
    }
}
