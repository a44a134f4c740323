//! Error type shared by every evaluation stage.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while loading, aligning, or evaluating pedal curves.
#[derive(Debug, Error)]
pub enum PedalError {
    /// A textual input could not be parsed.
    #[error("parse error on line {line}: {message}")]
    Parse { line: u64, message: String },

    /// The input held no usable data.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// A pedal depth fell outside `[0, 1]` or was not finite.
    #[error("value {value} out of range [0, 1] at {location}")]
    Range { location: String, value: f64 },

    /// A JSON document did not match the expected schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A binary MIDI file was malformed.
    #[error("MIDI format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },

    /// A well-formed MIDI feature that this crate does not handle.
    #[error("unsupported format: {0}")]
    Unsupported(String),

    /// Not enough samples for the requested operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Two curves were sampled at different rates.
    #[error("frame rate mismatch: reference {reference} Hz, estimate {estimate} Hz")]
    RateMismatch { reference: f64, estimate: f64 },

    /// Two sequences that must line up frame by frame have different lengths.
    #[error("length mismatch: reference {reference} frames, estimate {estimate} frames")]
    LengthMismatch { reference: usize, estimate: usize },

    /// A configuration value violated its invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A synthetic gesture specification cannot be realised.
    #[error("invalid gesture spec: {0}")]
    Spec(String),

    /// A numeric parameter was out of its allowed range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A report section needed for plotting was never computed.
    #[error("not computed: {0}")]
    NotComputed(String),

    /// Filesystem failure, tagged with the offending path.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Any error raised while handling a specific input file.
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: Box<PedalError>,
    },
}

impl PedalError {
    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        PedalError::File {
            path: path.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = PedalError> = std::result::Result<T, E>;
