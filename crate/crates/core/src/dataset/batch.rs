//! Batch tensor files for the trainer.
//!
//! Layout: the 8-byte magic `ECGB0001`, a little-endian `u32` header length,
//! a UTF-8 JSON header, then `count × leads × length` little-endian `f32`
//! samples in row-major order (record, then lead, then time).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::signal::{Label, Record, Signal};

use super::{read_file, write_file, DatasetError};

pub const MAGIC: &[u8; 8] = b"ECGB0001";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BatchHeader {
    count: usize,
    leads: usize,
    length: usize,
    sample_rate_hz: f64,
    labels: Vec<Option<u8>>,
    ids: Vec<String>,
    policy_fingerprint: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub records: Vec<Record>,
    pub policy_fingerprint: Option<String>,
}

impl Batch {
    /// Byte range of the sample payload within an encoded batch.
    pub fn payload_offset(bytes: &[u8]) -> Result<usize, DatasetError> {
        let (_, offset) = read_header(bytes)?;
        Ok(offset)
    }
}

pub fn encode_batch(
    records: &[Record],
    policy_fingerprint: Option<&str>,
) -> Result<Vec<u8>, DatasetError> {
    let (leads, length, rate) = match records.first() {
        Some(r) => (
            r.signal.num_leads(),
            r.signal.len(),
            r.signal.sample_rate_hz(),
        ),
        None => (1, 0, 0.0),
    };
    for r in records {
        let shape = (r.signal.num_leads(), r.signal.len());
        if shape != (leads, length) || r.signal.sample_rate_hz() != rate {
            return Err(DatasetError::RaggedBatch {
                id: r.id.clone(),
                expected: (leads, length),
                found: shape,
            });
        }
    }
    let header = BatchHeader {
        count: records.len(),
        leads,
        length,
        sample_rate_hz: rate,
        labels: records.iter().map(|r| r.label.map(Label::code)).collect(),
        ids: records.iter().map(|r| r.id.clone()).collect(),
        policy_fingerprint: policy_fingerprint.map(str::to_string),
    };
    let header = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(12 + header.len() + records.len() * leads * length * 4);
    out.extend_from_slice(MAGIC);
    out.extend((header.len() as u32).to_le_bytes());
    out.extend_from_slice(&header);
    for r in records {
        for lead in r.signal.leads() {
            for v in lead {
                out.extend(v.to_le_bytes());
            }
        }
    }
    Ok(out)
}

fn read_header(bytes: &[u8]) -> Result<(BatchHeader, usize), DatasetError> {
    if bytes.len() < 12 || &bytes[..8] != MAGIC {
        return Err(DatasetError::BadMagic);
    }
    let header_len = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let header_bytes = bytes.get(12..12 + header_len).ok_or_else(|| {
        DatasetError::BatchHeader(format!("header length {header_len} exceeds file"))
    })?;
    let header: BatchHeader = serde_json::from_slice(header_bytes)
        .map_err(|e| DatasetError::BatchHeader(e.to_string()))?;
    if header.ids.len() != header.count || header.labels.len() != header.count {
        return Err(DatasetError::BatchHeader(format!(
            "count {} but {} ids and {} labels",
            header.count,
            header.ids.len(),
            header.labels.len()
        )));
    }
    Ok((header, 12 + header_len))
}

pub fn decode_batch(bytes: &[u8]) -> Result<Batch, DatasetError> {
    let (header, offset) = read_header(bytes)?;
    let payload = &bytes[offset..];
    let expected = header.count as u128 * header.leads as u128 * header.length as u128 * 4;
    if payload.len() as u128 != expected {
        return Err(DatasetError::PayloadSize {
            expected,
            found: payload.len(),
        });
    }
    if header.count > 0 && (header.leads == 0 || header.length == 0) {
        return Err(DatasetError::BatchHeader(
            "records must have samples".into(),
        ));
    }
    let mut samples = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")));
    let mut records = Vec::with_capacity(header.count);
    for (id, code) in header.ids.into_iter().zip(header.labels) {
        let label = match code {
            None => None,
            Some(c) => Some(
                Label::from_code(c)
                    .ok_or_else(|| DatasetError::BatchHeader(format!("label code {c}")))?,
            ),
        };
        let leads = (0..header.leads)
            .map(|_| samples.by_ref().take(header.length).collect())
            .collect();
        let signal_err = |source| DatasetError::Signal {
            id: id.clone(),
            source,
        };
        let signal = Signal::new(header.sample_rate_hz, leads).map_err(signal_err)?;
        records.push(Record::new(id.clone(), signal, label).map_err(signal_err)?);
    }
    Ok(Batch {
        records,
        policy_fingerprint: header.policy_fingerprint,
    })
}

pub fn write_batch(
    path: &Path,
    records: &[Record],
    policy_fingerprint: Option<&str>,
) -> Result<(), DatasetError> {
    write_file(path, &encode_batch(records, policy_fingerprint)?)
}

pub fn read_batch(path: &Path) -> Result<Batch, DatasetError> {
    decode_batch(&read_file(path)?)
}
