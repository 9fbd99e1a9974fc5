use std::collections::BTreeMap;
use std::fmt::Write;

use super::annotation::{secs_to_ms, Annotation, Millis, SpeakerSegment};
use super::MetricsError;

/// Parses `SPEAKER` lines into annotations sorted by recording id. Other
/// record types, comments (`#`) and blank lines are skipped; segments keep
/// file order. Zero-duration segments carry no time and are dropped.
pub fn parse_rttm(document: &str) -> Result<Vec<Annotation>, MetricsError> {
    let mut by_uri: BTreeMap<String, Vec<SpeakerSegment>> = BTreeMap::new();
    for (n, raw) in document.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] != "SPEAKER" {
            continue;
        }
        let bad = |reason: String| MetricsError::MalformedLine { line: n + 1, reason };
        if !(9..=10).contains(&fields.len()) {
            return Err(bad(format!("expected 10 fields, found {}", fields.len())));
        }
        let number = |s: &str, what: &str| -> Result<f64, MetricsError> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("invalid {what} {s:?}")))
        };
        let onset = number(fields[3], "onset")?;
        let duration = number(fields[4], "duration")?;
        if duration < 0.0 {
            return Err(bad(format!("negative duration {duration}")));
        }
        if onset < 0.0 {
            return Err(bad(format!("negative onset {onset}")));
        }
        let start = secs_to_ms(onset);
        let end = start + secs_to_ms(duration);
        let segments = by_uri.entry(fields[1].to_owned()).or_default();
        if end > start {
            segments.push(SpeakerSegment::new(start, end, fields[7]));
        }
    }
    Ok(by_uri
        .into_iter()
        .map(|(uri, segments)| Annotation::new(uri, segments))
        .collect())
}

fn fmt_ms(ms: Millis) -> String {
    format!("{}.{:03}", ms / 1000, ms % 1000)
}

/// Writes one `SPEAKER` line per segment with 3-decimal onset and duration.
pub fn write_rttm(annotations: &[Annotation]) -> String {
    let mut out = String::new();
    for a in annotations {
        for s in &a.segments {
            let _ = writeln!(
                out,
                "SPEAKER {} 1 {} {} <NA> <NA> {} <NA> <NA>",
                a.uri,
                fmt_ms(s.start_ms),
                fmt_ms(s.duration_ms()),
                s.speaker
            );
        }
    }
    out
}
