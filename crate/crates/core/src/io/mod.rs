//! On-disk formats: binary score maps, JSON annotations and TOML config.

mod annotation;
mod config;
mod scoremap_file;

pub use annotation::{AnnotationFile, CharGroup, CharRecords, PolygonRecord, WordRecord};
pub use config::Config;
pub use scoremap_file::{
    decode_score_map, encode_score_map, read_score_map, write_score_map, CSM_MAGIC,
};

use std::path::{Path, PathBuf};

/// Failure reading or writing one of the file formats.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Malformed { path: PathBuf, message: String },
}

impl IoError {
    pub(crate) fn malformed(path: &Path, message: impl Into<String>) -> Self {
        IoError::Malformed {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }

    /// True for failures caused by the input rather than the output side.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, IoError::Write { .. })
    }
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>, IoError> {
    std::fs::read(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    std::fs::write(path, bytes).map_err(|source| IoError::Write {
        path: path.to_path_buf(),
        source,
    })
}
