use std::fmt;

use shobdosetu_core::audio::AudioError;
use shobdosetu_core::augment::AugmentError;
use shobdosetu_core::corpus::CorpusError;
use shobdosetu_core::diarpost::DiarpostError;
use shobdosetu_core::metrics::MetricsError;

/// Failure of a subcommand, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input, bad flags or config (exit 2).
    Input(String),
    /// Well-formed input that cannot be scored or processed (exit 3).
    Semantic(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Semantic(_) => 3,
        }
    }

    pub fn input(msg: impl fmt::Display) -> Self {
        CliError::Input(msg.to_string())
    }

    pub fn semantic(msg: impl fmt::Display) -> Self {
        CliError::Semantic(msg.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Semantic(m) => f.write_str(m),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::MalformedLine { .. } => CliError::input(e),
            MetricsError::EmptyReference | MetricsError::EmptyCorpus => CliError::semantic(e),
        }
    }
}

impl From<DiarpostError> for CliError {
    fn from(e: DiarpostError) -> Self {
        match e {
            DiarpostError::UnpairedRecording(_) | DiarpostError::InvalidGrid(_) => CliError::input(e),
            DiarpostError::EmptyReference => CliError::semantic(e),
        }
    }
}

impl From<AudioError> for CliError {
    fn from(e: AudioError) -> Self {
        match e {
            AudioError::NotFound(_)
            | AudioError::UnsupportedEncoding(_)
            | AudioError::MultiChannel(_)
            | AudioError::IoFailure(_) => CliError::input(e),
            _ => CliError::semantic(e),
        }
    }
}

impl From<AugmentError> for CliError {
    fn from(e: AugmentError) -> Self {
        match e {
            AugmentError::Audio(a) => a.into(),
            AugmentError::MissingNoise(_) => CliError::input(e),
            _ => CliError::semantic(e),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Audio(a) => a.into(),
            CorpusError::EmptyTranscript(_) | CorpusError::InconsistentDecision { .. } => CliError::semantic(e),
            _ => CliError::input(e),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
