use thiserror::Error;

/// Errors produced by the label-generation, pseudo-labelling and
/// post-processing routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate quadrilateral: {0}")]
    DegenerateQuad(String),

    #[error("projective divide by zero at ({x}, {y})")]
    ProjectiveDivideByZero { x: f64, y: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("polygon needs an even vertex count >= 4, got {0}")]
    OddVertexCount(usize),

    #[error("word length must be >= 1, got {0}")]
    InvalidLength(usize),

    #[error("word annotation has no transcription")]
    MissingTranscription,

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("too few local maxima lines ({0}) to build a polygon")]
    TooFewMaxima(usize),

    #[error("degenerate strip {0} while rectifying polygon")]
    DegenerateStrip(usize),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
