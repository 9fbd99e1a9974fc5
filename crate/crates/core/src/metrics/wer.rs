use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use super::MetricsError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextNormalization {
    /// Remove punctuation (ASCII, dandas, general punctuation) before splitting.
    pub strip_punctuation: bool,
}

pub(crate) fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(c, '\u{0964}' | '\u{0965}' | '«' | '»' | '¡' | '¿')
        || ('\u{2010}'..='\u{205E}').contains(&c)
}

/// NFC-normalises `text` and splits on whitespace runs.
pub fn tokenize(text: &str) -> Vec<String> {
    tokenize_with(text, TextNormalization::default())
}

pub fn tokenize_with(text: &str, norm: TextNormalization) -> Vec<String> {
    let nfc: String = text.nfc().collect();
    let cleaned: String = if norm.strip_punctuation {
        nfc.chars().map(|c| if is_punctuation(c) { ' ' } else { c }).collect()
    } else {
        nfc
    };
    cleaned.split_whitespace().map(str::to_owned).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum AlignOp {
    Match { ref_idx: usize, hyp_idx: usize },
    Substitute { ref_idx: usize, hyp_idx: usize },
    Delete { ref_idx: usize },
    Insert { hyp_idx: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCounts {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub correct: usize,
    pub reference_len: usize,
}

impl EditCounts {
    pub fn errors(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }

    /// `100 * errors / N`, or `None` when `N = 0`.
    pub fn wer_percent(&self) -> Option<f64> {
        (self.reference_len > 0).then(|| 100.0 * self.errors() as f64 / self.reference_len as f64)
    }
}

impl std::ops::AddAssign for EditCounts {
    fn add_assign(&mut self, o: Self) {
        self.substitutions += o.substitutions;
        self.deletions += o.deletions;
        self.insertions += o.insertions;
        self.correct += o.correct;
        self.reference_len += o.reference_len;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenAlignment {
    #[serde(flatten)]
    pub counts: EditCounts,
    pub ops: Vec<AlignOp>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WerReport {
    pub alignment: TokenAlignment,
    pub wer_percent: f64,
}

/// Minimal unit-cost edit alignment. On ties the backtrace prefers
/// match, then substitution, then deletion, then insertion.
pub fn align_tokens<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> TokenAlignment {
    let (n, m) = (reference.len(), hypothesis.len());
    let w = m + 1;
    let mut d = vec![0usize; (n + 1) * w];
    for j in 0..=m {
        d[j] = j;
    }
    for i in 1..=n {
        d[i * w] = i;
        for j in 1..=m {
            let sub = d[(i - 1) * w + j - 1] + usize::from(reference[i - 1] != hypothesis[j - 1]);
            let del = d[(i - 1) * w + j] + 1;
            let ins = d[i * w + j - 1] + 1;
            d[i * w + j] = sub.min(del).min(ins);
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let mut counts = EditCounts {
        reference_len: n,
        ..Default::default()
    };
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = d[i * w + j];
        if i > 0 && j > 0 && reference[i - 1] == hypothesis[j - 1] && here == d[(i - 1) * w + j - 1] {
            ops.push(AlignOp::Match { ref_idx: i - 1, hyp_idx: j - 1 });
            counts.correct += 1;
            i -= 1;
            j -= 1;
        } else if i > 0 && j > 0 && here == d[(i - 1) * w + j - 1] + 1 {
            ops.push(AlignOp::Substitute { ref_idx: i - 1, hyp_idx: j - 1 });
            counts.substitutions += 1;
            i -= 1;
            j -= 1;
        } else if i > 0 && here == d[(i - 1) * w + j] + 1 {
            ops.push(AlignOp::Delete { ref_idx: i - 1 });
            counts.deletions += 1;
            i -= 1;
        } else {
            ops.push(AlignOp::Insert { hyp_idx: j - 1 });
            counts.insertions += 1;
            j -= 1;
        }
    }
    ops.reverse();
    TokenAlignment { counts, ops }
}

pub fn wer(reference: &str, hypothesis: &str) -> Result<WerReport, MetricsError> {
    wer_with(reference, hypothesis, TextNormalization::default())
}

pub fn wer_with(
    reference: &str,
    hypothesis: &str,
    norm: TextNormalization,
) -> Result<WerReport, MetricsError> {
    let r = tokenize_with(reference, norm);
    let h = tokenize_with(hypothesis, norm);
    if r.is_empty() && !h.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    let alignment = align_tokens(&r, &h);
    let wer_percent = alignment.counts.wer_percent().unwrap_or(0.0);
    Ok(WerReport { alignment, wer_percent })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusWerReport {
    pub counts: EditCounts,
    /// Pooled: total errors over total reference tokens, ×100.
    pub wer_percent: f64,
    /// Unweighted mean over pairs with a non-empty reference.
    pub mean_pair_wer_percent: f64,
    pub num_pairs: usize,
}

/// Pooled WER over `(reference, hypothesis)` pairs.
pub fn corpus_wer<R, H>(pairs: &[(R, H)], norm: TextNormalization) -> Result<CorpusWerReport, MetricsError>
where
    R: AsRef<str>,
    H: AsRef<str>,
{
    let mut counts = EditCounts::default();
    let mut pair_wers = Vec::new();
    for (r, h) in pairs {
        let a = align_tokens(&tokenize_with(r.as_ref(), norm), &tokenize_with(h.as_ref(), norm));
        if let Some(w) = a.counts.wer_percent() {
            pair_wers.push(w);
        }
        counts += a.counts;
    }
    let wer_percent = counts.wer_percent().ok_or(MetricsError::EmptyCorpus)?;
    Ok(CorpusWerReport {
        counts,
        wer_percent,
        mean_pair_wer_percent: pair_wers.iter().sum::<f64>() / pair_wers.len() as f64,
        num_pairs: pairs.len(),
    })
}
