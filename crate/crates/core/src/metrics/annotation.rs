use std::collections::BTreeMap;

/// Integer milliseconds; all diarization time arithmetic happens in this unit.
pub type Millis = i64;

/// Converts seconds to the nearest millisecond.
pub fn secs_to_ms(s: f64) -> Millis {
    (s * 1000.0).round() as Millis
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpeakerSegment {
    pub start_ms: Millis,
    pub end_ms: Millis,
    pub speaker: String,
}

impl SpeakerSegment {
    pub fn new(start_ms: Millis, end_ms: Millis, speaker: impl Into<String>) -> Self {
        Self {
            start_ms,
            end_ms,
            speaker: speaker.into(),
        }
    }

    /// Builds a segment from seconds, rounding each boundary to 1 ms.
    pub fn from_secs(start_s: f64, end_s: f64, speaker: impl Into<String>) -> Self {
        Self::new(secs_to_ms(start_s), secs_to_ms(end_s), speaker)
    }

    pub fn start_s(&self) -> f64 {
        self.start_ms as f64 / 1000.0
    }

    pub fn end_s(&self) -> f64 {
        self.end_ms as f64 / 1000.0
    }

    pub fn duration_ms(&self) -> Millis {
        self.end_ms - self.start_ms
    }
}

/// Speaker segments of one recording. Different speakers may overlap.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Annotation {
    pub uri: String,
    pub segments: Vec<SpeakerSegment>,
}

impl Annotation {
    pub fn new(uri: impl Into<String>, segments: Vec<SpeakerSegment>) -> Self {
        Self {
            uri: uri.into(),
            segments,
        }
    }

    /// Sorted speaker labels.
    pub fn speakers(&self) -> Vec<&str> {
        let mut labels: Vec<&str> = self.segments.iter().map(|s| s.speaker.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    /// Segments grouped by speaker, each list sorted by start.
    pub fn by_speaker(&self) -> BTreeMap<&str, Vec<(Millis, Millis)>> {
        let mut map: BTreeMap<&str, Vec<(Millis, Millis)>> = BTreeMap::new();
        for s in &self.segments {
            map.entry(&s.speaker).or_default().push((s.start_ms, s.end_ms));
        }
        for v in map.values_mut() {
            v.sort_unstable();
        }
        map
    }

    /// Drops non-positive segments, merges overlapping or touching segments of
    /// the same speaker and sorts by `(start, end, speaker)`.
    pub fn canonicalize(&self) -> Annotation {
        let mut out = Vec::with_capacity(self.segments.len());
        for (speaker, spans) in self.by_speaker() {
            let mut current: Option<(Millis, Millis)> = None;
            for (s, e) in spans.into_iter().filter(|(s, e)| e > s) {
                current = match current {
                    Some((cs, ce)) if s <= ce => Some((cs, ce.max(e))),
                    Some((cs, ce)) => {
                        out.push(SpeakerSegment::new(cs, ce, speaker));
                        Some((s, e))
                    }
                    None => Some((s, e)),
                };
            }
            if let Some((cs, ce)) = current {
                out.push(SpeakerSegment::new(cs, ce, speaker));
            }
        }
        out.sort();
        Annotation {
            uri: self.uri.clone(),
            segments: out,
        }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonicalize()
    }

    /// Total speech per speaker in milliseconds (after canonicalisation).
    pub fn speech_ms(&self) -> BTreeMap<String, Millis> {
        let mut totals = BTreeMap::new();
        for s in self.canonicalize().segments {
            *totals.entry(s.speaker.clone()).or_insert(0) += s.duration_ms();
        }
        totals
    }
}
