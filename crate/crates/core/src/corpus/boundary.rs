use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use super::chunks::SubtitleChunk;
use super::gestalt::similarity_ratio;
use super::CorpusError;
use crate::audio::AudioClip;
use crate::metrics::wer::is_punctuation;

pub const DEFAULT_TAIL_S: f64 = 5.0;
pub const DEFAULT_FUZZY_THRESHOLD: f64 = 0.6;
/// Fraction of a chunk that non-speech zones must cover to null its text.
pub const NONSPEECH_COVERAGE: f64 = 0.8;

const CURRENT_WORDS: usize = 5;
const NEXT_WORDS: usize = 3;

/// The final `min(tail_s, duration)` seconds of the chunk's audio.
pub fn audio_tail(clip: &AudioClip, chunk: &SubtitleChunk, tail_s: f64) -> Result<AudioClip, CorpusError> {
    let sr = f64::from(clip.sample_rate_hz());
    let out_of_range = || CorpusError::OutOfRange {
        chunk_id: chunk.chunk_id.clone(),
        start_s: chunk.start_s,
        end_s: chunk.end_s(),
        audio_s: clip.duration_s(),
    };
    let end = (chunk.end_s() * sr).round();
    if chunk.start_s < 0.0 || end > clip.len() as f64 {
        return Err(out_of_range());
    }
    let end = end as usize;
    let len = (tail_s.max(0.0).min(chunk.duration_s) * sr).round() as usize;
    let start = end.checked_sub(len).ok_or_else(out_of_range)?;
    Ok(clip.slice(start, end))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CandidateOrigin {
    Current,
    Next,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub word: String,
    pub origin: CandidateOrigin,
    /// -5..=-1 from the end of the current chunk, 1..=3 into the next chunk.
    pub position: i32,
}

/// Last five words of `current` followed by the first three of `next`.
pub fn candidate_list(current: &SubtitleChunk, next: Option<&SubtitleChunk>) -> Result<Vec<Candidate>, CorpusError> {
    let cur = current.words();
    if cur.is_empty() {
        return Err(CorpusError::EmptyTranscript(current.chunk_id.clone()));
    }
    let tail = &cur[cur.len().saturating_sub(CURRENT_WORDS)..];
    let mut out: Vec<Candidate> = tail
        .iter()
        .enumerate()
        .map(|(i, w)| Candidate {
            word: (*w).to_owned(),
            origin: CandidateOrigin::Current,
            position: i as i32 - tail.len() as i32,
        })
        .collect();
    if let Some(next) = next {
        out.extend(next.words().into_iter().take(NEXT_WORDS).enumerate().map(|(i, w)| Candidate {
            word: w.to_owned(),
            origin: CandidateOrigin::Next,
            position: i as i32 + 1,
        }));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryAction {
    KeepBoundary,
    /// Move the first k words of the next chunk into this one.
    PullFromNext(usize),
    /// Move the last k words of this chunk into the next one.
    PushToNext(usize),
    Unvalidated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDecision {
    pub chunk_id: String,
    pub predicted_word: String,
    pub selected_candidate: String,
    pub candidate_index: usize,
    pub ratio: f64,
    pub action: BoundaryAction,
}

fn match_key(word: &str) -> String {
    word.nfc().collect::<String>().trim_matches(is_punctuation).to_owned()
}

/// Matches the last predicted word against every candidate (NFC, surrounding
/// punctuation ignored) and maps the best one to an action. Ties keep the
/// earlier candidate, so current-chunk words beat next-chunk words. An empty
/// prediction or a best ratio under `threshold` yields `Unvalidated`.
pub fn select_boundary(
    chunk_id: &str,
    predicted: &[String],
    candidates: &[Candidate],
    threshold: f64,
) -> Result<BoundaryDecision, CorpusError> {
    if candidates.is_empty() {
        return Err(CorpusError::EmptyTranscript(chunk_id.to_owned()));
    }
    let Some(last) = predicted.iter().rev().find(|w| !w.trim().is_empty()) else {
        return Ok(BoundaryDecision {
            chunk_id: chunk_id.to_owned(),
            predicted_word: String::new(),
            selected_candidate: String::new(),
            candidate_index: 0,
            ratio: 0.0,
            action: BoundaryAction::Unvalidated,
        });
    };
    let key = match_key(last);
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, c) in candidates.iter().enumerate() {
        let r = similarity_ratio(&key, &match_key(&c.word));
        if r > best.1 {
            best = (i, r);
        }
    }
    let (index, ratio) = best;
    let chosen = &candidates[index];
    let action = if ratio < threshold {
        BoundaryAction::Unvalidated
    } else {
        match chosen.origin {
            CandidateOrigin::Current if chosen.position == -1 => BoundaryAction::KeepBoundary,
            CandidateOrigin::Current => BoundaryAction::PushToNext((-chosen.position - 1) as usize),
            CandidateOrigin::Next => BoundaryAction::PullFromNext(chosen.position as usize),
        }
    };
    Ok(BoundaryDecision {
        chunk_id: chunk_id.to_owned(),
        predicted_word: last.clone(),
        selected_candidate: chosen.word.clone(),
        candidate_index: index,
        ratio,
        action,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Realigned {
    pub chunks: Vec<SubtitleChunk>,
    /// Chunks whose boundary could not be validated.
    pub excluded: BTreeSet<String>,
}

fn set_words(chunk: &mut SubtitleChunk, w: Vec<String>) {
    chunk.text = if w.is_empty() { None } else { Some(w.join(" ")) };
}

/// Applies boundary decisions in chunk order. A decision keyed by a chunk's
/// id moves words between that chunk and the chunk right after it in
/// `chunks`; timestamps never change. Texts only get rewritten (words joined
/// by single spaces) when words actually move, and a chunk left without words
/// becomes non-speech.
pub fn realign(chunks: &[SubtitleChunk], decisions: &[BoundaryDecision]) -> Result<Realigned, CorpusError> {
    let inconsistent = |id: &str, reason: String| CorpusError::InconsistentDecision { chunk_id: id.to_owned(), reason };
    let index: BTreeMap<&str, usize> = chunks.iter().enumerate().map(|(i, c)| (c.chunk_id.as_str(), i)).collect();
    let mut by_chunk: BTreeMap<usize, &BoundaryDecision> = BTreeMap::new();
    for d in decisions {
        let &i = index
            .get(d.chunk_id.as_str())
            .ok_or_else(|| inconsistent(&d.chunk_id, "unknown chunk".into()))?;
        if by_chunk.insert(i, d).is_some() {
            return Err(inconsistent(&d.chunk_id, "more than one decision".into()));
        }
    }

    let mut out = chunks.to_vec();
    let mut excluded = BTreeSet::new();
    for (i, d) in by_chunk {
        let moved = match d.action {
            BoundaryAction::KeepBoundary => continue,
            BoundaryAction::Unvalidated => {
                excluded.insert(d.chunk_id.clone());
                continue;
            }
            BoundaryAction::PullFromNext(k) | BoundaryAction::PushToNext(k) => k,
        };
        if moved == 0 {
            continue;
        }
        if i + 1 >= out.len() {
            return Err(inconsistent(&d.chunk_id, "no following chunk".into()));
        }
        let mut cur: Vec<String> = out[i].words().into_iter().map(str::to_owned).collect();
        let mut next: Vec<String> = out[i + 1].words().into_iter().map(str::to_owned).collect();
        match d.action {
            BoundaryAction::PullFromNext(k) => {
                if k > next.len() {
                    return Err(inconsistent(&d.chunk_id, format!("pull {k} from {} words", next.len())));
                }
                cur.extend(next.drain(..k));
            }
            BoundaryAction::PushToNext(k) => {
                if k > cur.len() {
                    return Err(inconsistent(&d.chunk_id, format!("push {k} of {} words", cur.len())));
                }
                let tail = cur.split_off(cur.len() - k);
                next.splice(0..0, tail);
            }
            _ => unreachable!(),
        }
        set_words(&mut out[i], cur);
        set_words(&mut out[i + 1], next);
    }
    Ok(Realigned { chunks: out, excluded })
}

/// Nulls the text when at least 80% of the chunk interval lies inside the
/// (sorted, non-overlapping) non-speech zones.
pub fn null_nonspeech(chunk: &SubtitleChunk, zones: &[(f64, f64)]) -> SubtitleChunk {
    let (s, e) = (chunk.start_s, chunk.end_s());
    let covered: f64 = zones.iter().map(|&(zs, ze)| (ze.min(e) - zs.max(s)).max(0.0)).sum();
    let mut out = chunk.clone();
    if covered >= NONSPEECH_COVERAGE * chunk.duration_s {
        out.text = None;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chunk(id: &str, start: f64, dur: f64, text: &str) -> SubtitleChunk {
        SubtitleChunk {
            chunk_id: id.into(),
            source_id: "s".into(),
            start_s: start,
            duration_s: dur,
            text: if text.is_empty() { None } else { Some(text.into()) },
        }
    }

    fn ws(n: usize, prefix: &str) -> String {
        (1..=n).map(|i| format!("{prefix}{i}")).collect::<Vec<_>>().join(" ")
    }

    fn decision(id: &str, action: BoundaryAction) -> BoundaryDecision {
        BoundaryDecision {
            chunk_id: id.into(),
            predicted_word: String::new(),
            selected_candidate: String::new(),
            candidate_index: 0,
            ratio: 1.0,
            action,
        }
    }

    #[test]
    fn tail_lengths() {
        let clip = AudioClip::silence(16_000 * 20, 16_000).unwrap();
        let long = chunk("a", 2.0, 12.0, "x");
        let t = audio_tail(&clip, &long, DEFAULT_TAIL_S).unwrap();
        assert_eq!(t.len(), 80_000);
        let short = chunk("b", 1.0, 3.0, "x");
        assert_eq!(audio_tail(&clip, &short, DEFAULT_TAIL_S).unwrap().len(), 48_000);
        let beyond = chunk("c", 15.0, 6.0, "x");
        assert!(matches!(audio_tail(&clip, &beyond, 5.0), Err(CorpusError::OutOfRange { .. })));
    }

    #[test]
    fn tail_ends_at_chunk_end() {
        let samples: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let clip = AudioClip::new(samples, 100).unwrap();
        let t = audio_tail(&clip, &chunk("a", 1.0, 7.0, "x"), 5.0).unwrap();
        assert_eq!(t.len(), 500);
        assert_eq!(t.samples()[0], 0.3);
        assert_eq!(*t.samples().last().unwrap(), 0.799);
    }

    #[test]
    fn candidate_counts_and_order() {
        let cur = chunk("a", 0.0, 1.0, &ws(10, "c"));
        let next = chunk("b", 1.0, 1.0, &ws(10, "n"));
        let c = candidate_list(&cur, Some(&next)).unwrap();
        assert_eq!(c.len(), 8);
        let words: Vec<&str> = c.iter().map(|x| x.word.as_str()).collect();
        assert_eq!(words, ["c6", "c7", "c8", "c9", "c10", "n1", "n2", "n3"]);
        assert_eq!(c[0].position, -5);
        assert_eq!(c[4].position, -1);
        assert_eq!(c[5].position, 1);
        assert_eq!(candidate_list(&chunk("a", 0.0, 1.0, "x y"), None).unwrap().len(), 2);
        assert!(matches!(candidate_list(&chunk("a", 0.0, 1.0, ""), None), Err(CorpusError::EmptyTranscript(_))));
        let silent_next = chunk("b", 1.0, 1.0, "");
        assert_eq!(candidate_list(&cur, Some(&silent_next)).unwrap().len(), 5);
    }

    fn cands(cur: &str, next: &str) -> Vec<Candidate> {
        candidate_list(&chunk("a", 0.0, 1.0, cur), Some(&chunk("b", 1.0, 1.0, next))).unwrap()
    }

    #[test]
    fn selection_actions() {
        let c = cands("one two three four five", "six shes seven");
        let d = select_boundary("a", &["x".into(), "five".into()], &c, 0.6).unwrap();
        assert_eq!((d.action, d.ratio), (BoundaryAction::KeepBoundary, 1.0));
        let d = select_boundary("a", &["three".into()], &c, 0.6).unwrap();
        assert_eq!(d.action, BoundaryAction::PushToNext(2));
        let d = select_boundary("a", &["shesh".into()], &c, 0.6).unwrap();
        assert_eq!(d.action, BoundaryAction::PullFromNext(2));
        assert!((d.ratio - 0.889).abs() < 1e-3);
        let d = select_boundary("a", &["abcdefghij".into()], &cands("abcdxxxxxx", "zz"), 0.6).unwrap();
        assert_eq!((d.action, d.ratio), (BoundaryAction::Unvalidated, 0.4));
        let d = select_boundary("a", &[], &c, 0.6).unwrap();
        assert_eq!(d.action, BoundaryAction::Unvalidated);
        assert!(select_boundary("a", &["x".into()], &[], 0.6).is_err());
    }

    #[test]
    fn ties_prefer_current_then_earliest() {
        let c = cands("ab x ab", "ab");
        let d = select_boundary("a", &["ab".into()], &c, 0.6).unwrap();
        assert_eq!(d.candidate_index, 0);
        assert_eq!(d.action, BoundaryAction::PushToNext(2));
        let d = select_boundary("a", &["ab।".into()], &cands("q", "ab"), 0.6).unwrap();
        assert_eq!(d.action, BoundaryAction::PullFromNext(1));
    }

    #[test]
    fn realign_moves() {
        let chunks = vec![chunk("a", 0.0, 1.0, "x y"), chunk("b", 1.0, 1.0, "w1 w2 w3"), chunk("c", 2.0, 1.0, "z")];
        let keep = realign(&chunks, &[decision("a", BoundaryAction::KeepBoundary)]).unwrap();
        assert_eq!(keep.chunks, chunks);
        let r = realign(&chunks, &[decision("a", BoundaryAction::PullFromNext(2))]).unwrap();
        assert_eq!(r.chunks[0].text.as_deref(), Some("x y w1 w2"));
        assert_eq!(r.chunks[1].text.as_deref(), Some("w3"));
        assert_eq!(r.chunks[1].start_s, 1.0);
        let r = realign(&chunks, &[decision("b", BoundaryAction::PushToNext(3)), decision("a", BoundaryAction::Unvalidated)]).unwrap();
        assert_eq!(r.chunks[1].text, None);
        assert_eq!(r.chunks[2].text.as_deref(), Some("w1 w2 w3 z"));
        assert!(r.excluded.contains("a"));
        for bad in [
            vec![decision("a", BoundaryAction::PullFromNext(4))],
            vec![decision("c", BoundaryAction::PushToNext(1))],
            vec![decision("zz", BoundaryAction::KeepBoundary)],
            vec![decision("a", BoundaryAction::KeepBoundary), decision("a", BoundaryAction::KeepBoundary)],
        ] {
            assert!(matches!(realign(&chunks, &bad), Err(CorpusError::InconsistentDecision { .. })));
        }
    }

    #[test]
    fn nonspeech_coverage() {
        let c = chunk("a", 10.0, 10.0, "x");
        assert_eq!(null_nonspeech(&c, &[(0.0, 30.0)]).text, None);
        assert_eq!(null_nonspeech(&c, &[(40.0, 50.0)]), c);
        assert_eq!(null_nonspeech(&c, &[(15.0, 25.0)]), c);
        assert_eq!(null_nonspeech(&c, &[(10.0, 14.0), (16.0, 20.0)]).text, None);
        assert_eq!(null_nonspeech(&c, &[(10.0, 17.9)]), c);
    }

    fn arb_action() -> impl Strategy<Value = BoundaryAction> {
        prop_oneof![
            Just(BoundaryAction::KeepBoundary),
            Just(BoundaryAction::Unvalidated),
            (1usize..4).prop_map(BoundaryAction::PullFromNext),
            (1usize..5).prop_map(BoundaryAction::PushToNext),
        ]
    }

    proptest! {
        #[test]
        fn realign_conserves_words(sizes in prop::collection::vec(0usize..7, 2..6), actions in prop::collection::vec(arb_action(), 6)) {
            let chunks: Vec<SubtitleChunk> = sizes
                .iter()
                .enumerate()
                .map(|(i, &n)| chunk(&format!("c{i}"), i as f64, 1.0, &ws(n, &format!("w{i}_"))))
                .collect();
            let decisions: Vec<BoundaryDecision> = chunks[..chunks.len() - 1]
                .iter()
                .zip(&actions)
                .map(|(c, a)| decision(&c.chunk_id, *a))
                .collect();
            let mut before: Vec<String> = chunks.iter().flat_map(|c| c.words()).map(str::to_owned).collect();
            if let Ok(r) = realign(&chunks, &decisions) {
                let mut after: Vec<String> = r.chunks.iter().flat_map(|c| c.words()).map(str::to_owned).collect();
                // Words also keep their global order.
                prop_assert_eq!(&after, &before);
                before.sort();
                after.sort();
                prop_assert_eq!(after, before);
                for (a, b) in r.chunks.iter().zip(&chunks) {
                    prop_assert_eq!(a.start_s, b.start_s);
                    prop_assert_eq!(a.duration_s, b.duration_s);
                }
            }
        }
    }
}
