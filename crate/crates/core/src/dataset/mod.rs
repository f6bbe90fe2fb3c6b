//! Dataset ingestion and hand-off formats: matrix containers, reference
//! labels, manifests, seeded splits and batch tensor files.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::signal::{RawRecord, Record, Signal, SignalError};

pub mod batch;
pub mod container;
pub mod labels;
pub mod manifest;
pub mod split;

pub use batch::{decode_batch, encode_batch, read_batch, write_batch, Batch};
pub use container::{parse_matrix_container, ContainerError, Matrix, MatrixValues};
pub use labels::load_labels;
pub use manifest::{DatasetManifest, ManifestEntry, SplitTag};
pub use split::{split, SplitManifests, SplitSpec};

/// Matrix name used by the challenge signal files.
pub const SIGNAL_MATRIX: &str = "val";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("row {row}: {reason}")]
    Csv { row: usize, reason: String },
    #[error("row {row}: unknown label code {code:?}")]
    UnknownLabel { row: usize, code: String },
    #[error("row {row}: duplicate record id {id}")]
    DuplicateLabel { row: usize, id: String },
    #[error("manifest line {line}: {reason}")]
    Manifest { line: usize, reason: String },
    #[error("duplicate record id {0}")]
    DuplicateId(String),
    #[error("manifest is empty")]
    EmptyManifest,
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("split leaves the {0} partition empty")]
    EmptyPartition(SplitTag),
    #[error("not a batch file (bad magic)")]
    BadMagic,
    #[error("malformed batch header: {0}")]
    BatchHeader(String),
    #[error("batch payload is {found} bytes, header implies {expected}")]
    PayloadSize { expected: u128, found: usize },
    #[error("record {id} has shape {found:?}, batch expects {expected:?}")]
    RaggedBatch {
        id: String,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("record {id}: file holds {found} samples, manifest says {expected}")]
    LengthMismatch {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Container {
        path: PathBuf,
        #[source]
        source: ContainerError,
    },
    #[error("record {id}: {source}")]
    Signal {
        id: String,
        #[source]
        source: SignalError,
    },
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>, DatasetError> {
    std::fs::read(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), DatasetError> {
    std::fs::write(path, bytes).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads the signal matrix of a container, falling back to its first matrix.
pub fn load_matrix(path: &Path) -> Result<Matrix, DatasetError> {
    let bytes = read_file(path)?;
    container::find_matrix(&bytes, Some(SIGNAL_MATRIX))
        .or_else(|e| match e {
            ContainerError::MissingMatrix(_) => container::parse_matrix_container(&bytes),
            other => Err(other),
        })
        .map_err(|source| DatasetError::Container {
            path: path.to_path_buf(),
            source,
        })
}

fn check_length(entry: &ManifestEntry, found: usize) -> Result<(), DatasetError> {
    if found != entry.length {
        return Err(DatasetError::LengthMismatch {
            id: entry.record_id.clone(),
            expected: entry.length,
            found,
        });
    }
    Ok(())
}

/// Loads the container behind a manifest entry as raw counts.
pub fn load_raw_record(
    manifest_path: &Path,
    entry: &ManifestEntry,
) -> Result<RawRecord, DatasetError> {
    let matrix = load_matrix(&manifest::resolve(manifest_path, entry))?;
    check_length(entry, matrix.cols)?;
    Ok(RawRecord {
        id: entry.record_id.clone(),
        signal: matrix.to_raw_signal(entry.sample_rate_hz),
        label: Some(entry.label),
    })
}

/// Loads an already-normalized record (e.g. the output of preprocessing).
pub fn load_record(manifest_path: &Path, entry: &ManifestEntry) -> Result<Record, DatasetError> {
    let matrix = load_matrix(&manifest::resolve(manifest_path, entry))?;
    check_length(entry, matrix.cols)?;
    let leads = (0..matrix.rows)
        .map(|r| matrix.row(r).into_iter().map(|v| v as f32).collect())
        .collect();
    let signal_err = |source| DatasetError::Signal {
        id: entry.record_id.clone(),
        source,
    };
    let signal = Signal::new(entry.sample_rate_hz, leads).map_err(signal_err)?;
    Record::new(entry.record_id.clone(), signal, Some(entry.label)).map_err(signal_err)
}

/// Writes a normalized record as a single-precision container.
pub fn save_record(path: &Path, record: &Record) -> Result<(), DatasetError> {
    let matrix = Matrix::from_leads(SIGNAL_MATRIX, record.signal.leads());
    write_file(path, &container::write_matrix(&matrix))
}
