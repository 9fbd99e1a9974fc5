use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::annotation::{secs_to_ms, Annotation, Millis};
use super::assignment::lexicographic_max_assignment;
use super::MetricsError;

/// Error durations in integer milliseconds. Components from several
/// recordings add up before dividing, which gives the pooled DER.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerComponents {
    pub false_alarm_ms: Millis,
    pub missed_ms: Millis,
    pub confusion_ms: Millis,
    pub total_ms: Millis,
}

impl DerComponents {
    pub fn error_ms(&self) -> Millis {
        self.false_alarm_ms + self.missed_ms + self.confusion_ms
    }

    pub fn der(&self) -> Option<f64> {
        (self.total_ms > 0).then(|| self.error_ms() as f64 / self.total_ms as f64)
    }

    /// Exact comparison of the two error ratios (cross-multiplied).
    /// An empty reference sorts after every scorable one.
    pub fn cmp_der(&self, other: &Self) -> Ordering {
        match (self.total_ms > 0, other.total_ms > 0) {
            (true, true) => (i128::from(self.error_ms()) * i128::from(other.total_ms))
                .cmp(&(i128::from(other.error_ms()) * i128::from(self.total_ms))),
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => Ordering::Equal,
        }
    }
}

impl std::ops::AddAssign for DerComponents {
    fn add_assign(&mut self, o: Self) {
        self.false_alarm_ms += o.false_alarm_ms;
        self.missed_ms += o.missed_ms;
        self.confusion_ms += o.confusion_ms;
        self.total_ms += o.total_ms;
    }
}

impl std::iter::Sum for DerComponents {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), |mut acc, c| {
            acc += c;
            acc
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerReport {
    pub false_alarm_s: f64,
    pub missed_s: f64,
    pub confusion_s: f64,
    pub total_s: f64,
    pub der: f64,
    /// Hypothesis label -> reference label.
    pub mapping: BTreeMap<String, String>,
}

impl DerReport {
    pub fn from_components(c: DerComponents, mapping: BTreeMap<String, String>) -> Result<Self, MetricsError> {
        let der = c.der().ok_or(MetricsError::EmptyReference)?;
        Ok(Self {
            false_alarm_s: c.false_alarm_ms as f64 / 1000.0,
            missed_s: c.missed_ms as f64 / 1000.0,
            confusion_s: c.confusion_ms as f64 / 1000.0,
            total_s: c.total_ms as f64 / 1000.0,
            der,
            mapping,
        })
    }
}

/// Co-activity of hypothesis and reference speakers over the scored timeline.
pub struct OverlapMatrix {
    pub hyp_labels: Vec<String>,
    pub ref_labels: Vec<String>,
    /// `overlap_ms[h][r]`
    pub overlap_ms: Vec<Vec<Millis>>,
    /// Components before confusion is known: `confusion_ms` holds
    /// `sum d * min(|R|, |H|)` until the mapping is subtracted.
    base: DerComponents,
}

#[derive(Clone, Copy)]
enum Track {
    Ref(usize),
    Hyp(usize),
    Collar,
}

/// Builds the speaker overlap matrix and uncorrected error sums.
/// Time within `collar_s` of any reference boundary is excluded.
pub fn overlap_matrix(reference: &Annotation, hypothesis: &Annotation, collar_s: f64) -> OverlapMatrix {
    let reference = reference.canonicalize();
    let hypothesis = hypothesis.canonicalize();
    let ref_labels: Vec<String> = reference.speakers().into_iter().map(str::to_owned).collect();
    let hyp_labels: Vec<String> = hypothesis.speakers().into_iter().map(str::to_owned).collect();
    let index = |labels: &[String], s: &str| labels.binary_search_by(|l| l.as_str().cmp(s)).unwrap();

    let mut events: Vec<(Millis, i64, Track)> = Vec::new();
    for s in &reference.segments {
        let t = Track::Ref(index(&ref_labels, &s.speaker));
        events.push((s.start_ms, 1, t));
        events.push((s.end_ms, -1, t));
    }
    for s in &hypothesis.segments {
        let t = Track::Hyp(index(&hyp_labels, &s.speaker));
        events.push((s.start_ms, 1, t));
        events.push((s.end_ms, -1, t));
    }
    let collar = secs_to_ms(collar_s.max(0.0));
    if collar > 0 {
        for s in &reference.segments {
            for b in [s.start_ms, s.end_ms] {
                events.push((b - collar, 1, Track::Collar));
                events.push((b + collar, -1, Track::Collar));
            }
        }
    }
    events.sort_by_key(|e| e.0);

    let mut ref_active = vec![0i64; ref_labels.len()];
    let mut hyp_active = vec![0i64; hyp_labels.len()];
    let mut collar_active = 0i64;
    let mut overlap = vec![vec![0 as Millis; ref_labels.len()]; hyp_labels.len()];
    let mut base = DerComponents::default();
    let mut refs = Vec::new();
    let mut hyps = Vec::new();

    let mut i = 0;
    while i < events.len() {
        let t = events[i].0;
        while i < events.len() && events[i].0 == t {
            let (_, delta, track) = events[i];
            match track {
                Track::Ref(r) => ref_active[r] += delta,
                Track::Hyp(h) => hyp_active[h] += delta,
                Track::Collar => collar_active += delta,
            }
            i += 1;
        }
        let Some(&(next, _, _)) = events.get(i) else { break };
        let d = next - t;
        if d <= 0 || collar_active > 0 {
            continue;
        }
        refs.clear();
        refs.extend((0..ref_labels.len()).filter(|&r| ref_active[r] > 0));
        hyps.clear();
        hyps.extend((0..hyp_labels.len()).filter(|&h| hyp_active[h] > 0));
        let (nr, nh) = (refs.len() as i64, hyps.len() as i64);
        base.total_ms += d * nr;
        base.missed_ms += d * (nr - nh).max(0);
        base.false_alarm_ms += d * (nh - nr).max(0);
        base.confusion_ms += d * nr.min(nh);
        for &h in &hyps {
            for &r in &refs {
                overlap[h][r] += d;
            }
        }
    }
    OverlapMatrix {
        hyp_labels,
        ref_labels,
        overlap_ms: overlap,
        base,
    }
}

fn resolve(m: &OverlapMatrix) -> (DerComponents, BTreeMap<String, String>) {
    let (matched, assignment) = lexicographic_max_assignment(&m.overlap_ms);
    let mapping = assignment
        .iter()
        .enumerate()
        .filter_map(|(h, r)| r.map(|r| (m.hyp_labels[h].clone(), m.ref_labels[r].clone())))
        .collect();
    let mut c = m.base;
    c.confusion_ms -= matched;
    (c, mapping)
}

/// DER components and the speaker mapping, without rejecting an empty reference.
pub fn der_components(
    reference: &Annotation,
    hypothesis: &Annotation,
    collar_s: f64,
) -> (DerComponents, BTreeMap<String, String>) {
    resolve(&overlap_matrix(reference, hypothesis, collar_s))
}

/// One-to-one hypothesis -> reference mapping maximising co-active time.
/// Ties resolve to the lexicographically smallest mapping; speakers with no
/// overlap stay unmapped.
pub fn optimal_mapping(reference: &Annotation, hypothesis: &Annotation) -> BTreeMap<String, String> {
    der_components(reference, hypothesis, 0.0).1
}

pub fn der(reference: &Annotation, hypothesis: &Annotation, collar_s: f64) -> Result<DerReport, MetricsError> {
    let (c, mapping) = der_components(reference, hypothesis, collar_s);
    DerReport::from_components(c, mapping)
}
