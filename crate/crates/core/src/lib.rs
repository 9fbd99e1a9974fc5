//! Data pipeline toolkit for long-form Bengali speech.
//!
//! The crate is split by pipeline stage:
//!
//! * [`audio`]: mono sample buffers, WAV I/O, STFT/ISTFT and level utilities.
//! * [`augment`]: zone-limited covered-microphone and underwater degradations.
//! * [`corpus`]: subtitle chunk parsing, script filtering, boundary validation
//!   and manifest output.
//! * [`metrics`]: word error rate and diarization error rate scoring.
//! * [`diarpost`]: diarization post-processing and parameter grid search.

pub mod audio;
pub mod augment;
pub mod corpus;
pub mod diarpost;
pub mod hash;
pub mod metrics;

pub use audio::{AudioClip, AudioError, Spectrogram};
pub use augment::{AugmentError, AugmentRecipe};
pub use metrics::{Annotation, DerReport, MetricsError, SpeakerSegment, WerReport};
pub use corpus::{CorpusError, ManifestEntry, SubtitleChunk};
pub use diarpost::{DiarpostError, GridResult, ParamGrid, PostParams};



