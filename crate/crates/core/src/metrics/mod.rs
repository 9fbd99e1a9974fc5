//! Word error rate and diarization error rate scoring.
//!
//! WER = (S + D + I) / N over whitespace tokens. DER = (false alarm + missed
//! speech + speaker confusion) / total reference speech, computed over integer
//! milliseconds with an optimal one-to-one speaker mapping.

pub(crate) mod annotation;
mod assignment;
mod der;
mod rttm;
pub(crate) mod wer;

pub use annotation::{Annotation, Millis, SpeakerSegment};
pub use assignment::{max_weight_assignment, lexicographic_max_assignment};
pub use der::{der, der_components, optimal_mapping, overlap_matrix, DerComponents, DerReport, OverlapMatrix};
pub use rttm::{parse_rttm, write_rttm};
pub use wer::{
    align_tokens, corpus_wer, tokenize, tokenize_with, wer, wer_with, AlignOp, CorpusWerReport,
    EditCounts, TextNormalization, TokenAlignment, WerReport,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("reference is empty")]
    EmptyReference,
    #[error("no pair has a non-empty reference")]
    EmptyCorpus,
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
}
