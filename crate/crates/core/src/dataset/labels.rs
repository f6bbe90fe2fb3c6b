//! Two-column `record_id,code` files, as used by the challenge reference
//! labels and by prediction exports.

use std::collections::BTreeMap;

use crate::signal::Label;

use super::DatasetError;

/// Parses every `(row, id, label)` entry. Rows are 1-based; blank lines are
/// skipped.
pub fn parse_label_rows(bytes: &[u8]) -> Result<Vec<(usize, String, Label)>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut rows = Vec::new();
    for (i, result) in reader.records().enumerate() {
        let position = match &result {
            Ok(r) => r.position(),
            Err(e) => e.position(),
        };
        let row = position.map_or(i + 1, |p| p.line() as usize);
        let record = result.map_err(|e| DatasetError::Csv {
            row,
            reason: e.to_string(),
        })?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(DatasetError::Csv {
                row,
                reason: format!("expected 2 columns, found {}", record.len()),
            });
        }
        let id = &record[0];
        if id.is_empty() {
            return Err(DatasetError::Csv {
                row,
                reason: "empty record id".into(),
            });
        }
        let label = Label::from_letter(&record[1]).ok_or_else(|| DatasetError::UnknownLabel {
            row,
            code: record[1].to_string(),
        })?;
        rows.push((row, id.to_string(), label));
    }
    Ok(rows)
}

/// Reads a reference label file into `record_id → Label`.
pub fn load_labels(bytes: &[u8]) -> Result<BTreeMap<String, Label>, DatasetError> {
    let mut labels = BTreeMap::new();
    for (row, id, label) in parse_label_rows(bytes)? {
        if labels.insert(id.clone(), label).is_some() {
            return Err(DatasetError::DuplicateLabel { row, id });
        }
    }
    Ok(labels)
}

/// Writes `record_id,code` lines in the given order.
pub fn write_labels<'a>(rows: impl IntoIterator<Item = (&'a str, Label)>) -> String {
    rows.into_iter()
        .map(|(id, label)| format!("{id},{}\n", label.letter()))
        .collect()
}

/// Count per label code.
pub fn class_counts<'a>(labels: impl IntoIterator<Item = &'a Label>) -> [usize; 4] {
    let mut counts = [0; 4];
    for label in labels {
        counts[label.code() as usize] += 1;
    }
    counts
}
