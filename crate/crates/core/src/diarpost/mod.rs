//! Diarization post-processing (same-speaker gap merging, boundary rounding)
//! and an exhaustive parameter grid search scored by pooled DER.

mod grid;
mod post;

pub use grid::{grid_search, GridDimension, GridResult, GridRow, ParamGrid};
pub use post::{apply_post, merge_segments, round_boundaries, PostParams};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DiarpostError {
    #[error("recording {0:?} has no counterpart on the other side")]
    UnpairedRecording(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("references contain no speech")]
    EmptyReference,
}
