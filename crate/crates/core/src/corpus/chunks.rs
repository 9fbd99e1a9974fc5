use serde::{Deserialize, Serialize};

use super::CorpusError;

/// One timestamped subtitle unit. `text == None` marks non-speech.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubtitleChunk {
    pub chunk_id: String,
    pub source_id: String,
    pub start_s: f64,
    pub duration_s: f64,
    pub text: Option<String>,
}

impl SubtitleChunk {
    pub fn end_s(&self) -> f64 {
        self.start_s + self.duration_s
    }

    pub fn words(&self) -> Vec<&str> {
        self.text.as_deref().map(words).unwrap_or_default()
    }
}

/// Whitespace-separated words of `text`.
pub fn words(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

#[derive(Deserialize)]
struct RawChunk {
    start: Option<f64>,
    duration: Option<f64>,
    #[serde(default)]
    text: Option<String>,
}

/// Parses a JSON array of `{"start", "duration", "text"}` objects for one
/// source. Chunks are sorted by start (stable), overlaps are clipped at the
/// midpoint of the overlapping region, and ids are `{source_id}_{index:05}`
/// in sorted order. Missing, null or blank text means non-speech.
pub fn parse_chunks(document: &str, source_id: &str) -> Result<Vec<SubtitleChunk>, CorpusError> {
    let raw: Vec<RawChunk> =
        serde_json::from_str(document).map_err(|e| CorpusError::MalformedDocument(e.to_string()))?;
    let mut spans = Vec::with_capacity(raw.len());
    for (index, r) in raw.into_iter().enumerate() {
        let start = r
            .start
            .ok_or_else(|| CorpusError::MalformedDocument(format!("chunk {index}: missing \"start\"")))?;
        let duration = r
            .duration
            .ok_or_else(|| CorpusError::MalformedDocument(format!("chunk {index}: missing \"duration\"")))?;
        if !start.is_finite() || !duration.is_finite() {
            return Err(CorpusError::MalformedDocument(format!("chunk {index}: non-finite time")));
        }
        if start < 0.0 {
            return Err(CorpusError::NegativeTime { index, field: "start", value: start });
        }
        if duration < 0.0 {
            return Err(CorpusError::NegativeTime { index, field: "duration", value: duration });
        }
        if duration == 0.0 {
            return Err(CorpusError::MalformedDocument(format!("chunk {index}: zero duration")));
        }
        let text = r.text.filter(|t| !t.trim().is_empty());
        spans.push((start, start + duration, text));
    }
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));

    for i in 1..spans.len() {
        let (prev, next) = spans.split_at_mut(i);
        let prev = prev.last_mut().expect("i >= 1");
        let next = &mut next[0];
        let lo = prev.0.max(next.0);
        let hi = prev.1.min(next.1);
        if hi > lo {
            let mid = 0.5 * (lo + hi);
            prev.1 = mid;
            next.0 = mid;
        }
    }

    Ok(spans
        .into_iter()
        .enumerate()
        .map(|(i, (start, end, text))| SubtitleChunk {
            chunk_id: format!("{source_id}_{i:05}"),
            source_id: source_id.to_owned(),
            start_s: start,
            duration_s: end - start,
            text,
        })
        .collect())
}
