use serde::{Deserialize, Serialize};

use crate::metrics::annotation::secs_to_ms;
use crate::metrics::{Annotation, Millis, SpeakerSegment};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PostParams {
    /// Same-speaker gaps strictly shorter than this are bridged.
    pub min_duration_off_s: f64,
    /// Boundary rounding step; 0 disables rounding.
    pub round_granularity_s: f64,
    /// Segments shorter than this are dropped after merging.
    pub min_segment_s: f64,
}

impl PostParams {
    pub fn is_valid(&self) -> bool {
        [self.min_duration_off_s, self.round_granularity_s, self.min_segment_s]
            .iter()
            .all(|v| v.is_finite() && *v >= 0.0)
    }
}

/// Bridges same-speaker gaps strictly shorter than `min_duration_off_s`.
/// Different speakers are never merged.
pub fn merge_segments(ann: &Annotation, min_duration_off_s: f64) -> Annotation {
    let threshold = secs_to_ms(min_duration_off_s.max(0.0));
    let mut out = Vec::with_capacity(ann.segments.len());
    for (speaker, spans) in ann.canonicalize().by_speaker() {
        let mut iter = spans.into_iter();
        let Some(mut cur) = iter.next() else { continue };
        for (s, e) in iter {
            if s - cur.1 < threshold {
                cur.1 = cur.1.max(e);
            } else {
                out.push(SpeakerSegment::new(cur.0, cur.1, speaker));
                cur = (s, e);
            }
        }
        out.push(SpeakerSegment::new(cur.0, cur.1, speaker));
    }
    Annotation::new(ann.uri.clone(), out).canonicalize()
}

/// Nearest multiple of `step`, halves rounded away from zero.
fn round_to(t: Millis, step: Millis) -> Millis {
    let q = (2 * t.abs() + step).div_euclid(2 * step) * step;
    q * t.signum()
}

/// Rounds every boundary to the nearest multiple of `granularity_s` (halves
/// away from zero) and drops segments that collapse. Granularity 0 is the identity.
pub fn round_boundaries(ann: &Annotation, granularity_s: f64) -> Annotation {
    let step = secs_to_ms(granularity_s.max(0.0));
    if step == 0 {
        return ann.clone();
    }
    let segments = ann
        .segments
        .iter()
        .map(|s| SpeakerSegment::new(round_to(s.start_ms, step), round_to(s.end_ms, step), s.speaker.clone()))
        .filter(|s| s.end_ms > s.start_ms)
        .collect();
    Annotation::new(ann.uri.clone(), segments)
}

fn post_pass(ann: &Annotation, params: &PostParams) -> Annotation {
    let merged = merge_segments(ann, params.min_duration_off_s);
    let min_len = secs_to_ms(params.min_segment_s.max(0.0));
    let kept = Annotation::new(
        merged.uri.clone(),
        merged.segments.into_iter().filter(|s| s.duration_ms() >= min_len).collect(),
    );
    round_boundaries(&kept, params.round_granularity_s).canonicalize()
}

/// Merge, drop short segments, round, canonicalise; repeated until nothing
/// changes. Rounding can shrink a segment or a gap, so one pass alone is not
/// idempotent. Every pass after the first only removes segments, so the loop
/// ends within `segments.len()` passes.
pub fn apply_post(ann: &Annotation, params: &PostParams) -> Annotation {
    let mut current = post_pass(ann, params);
    loop {
        let next = post_pass(&current, params);
        if next == current {
            return current;
        }
        current = next;
    }
}
