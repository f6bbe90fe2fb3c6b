//! Line-oriented manifest files.
//!
//! ```text
//! # ecg-manifest v1
//! # dataset_seed: 0
//! # split: train
//! record_id  path            label  length  sample_rate_hz
//! A00001     raw/A00001.mat  0      9000    300
//! ```
//!
//! Columns are separated by single tabs. Paths are relative to the directory holding the manifest.

use std::collections::HashSet;
use std::fmt;
use std::path::{Component, Path, PathBuf};
use std::str::FromStr;

use crate::signal::Label;

use super::{read_file, write_file, DatasetError};

const MAGIC_LINE: &str = "# ecg-manifest v1";
const COLUMNS: &str = "record_id\tpath\tlabel\tlength\tsample_rate_hz";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitTag {
    Train,
    Val,
    Test,
}

impl SplitTag {
    pub const ALL: [SplitTag; 3] = [SplitTag::Train, SplitTag::Val, SplitTag::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            SplitTag::Train => "train",
            SplitTag::Val => "val",
            SplitTag::Test => "test",
        }
    }
}

impl fmt::Display for SplitTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(SplitTag::Train),
            "val" => Ok(SplitTag::Val),
            "test" => Ok(SplitTag::Test),
            other => Err(format!("unknown split tag {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub record_id: String,
    /// Relative to the manifest's directory.
    pub path: PathBuf,
    pub label: Label,
    pub length: usize,
    pub sample_rate_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    entries: Vec<ManifestEntry>,
    pub dataset_seed: u64,
    pub split_tag: Option<SplitTag>,
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>, dataset_seed: u64) -> Result<Self, DatasetError> {
        let mut seen = HashSet::with_capacity(entries.len());
        for entry in &entries {
            if !seen.insert(entry.record_id.as_str()) {
                return Err(DatasetError::DuplicateId(entry.record_id.clone()));
            }
        }
        Ok(Self {
            entries,
            dataset_seed,
            split_tag: None,
        })
    }

    pub fn with_split(mut self, tag: SplitTag) -> Self {
        self.split_tag = Some(tag);
        self
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, record_id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.record_id == record_id)
    }

    pub fn class_counts(&self) -> [usize; 4] {
        super::labels::class_counts(self.entries.iter().map(|e| &e.label))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC_LINE}\n# dataset_seed: {}\n", self.dataset_seed);
        if let Some(tag) = self.split_tag {
            out.push_str(&format!("# split: {tag}\n"));
        }
        out.push_str(COLUMNS);
        out.push('\n');
        for e in &self.entries {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                e.record_id,
                path_to_text(&e.path),
                e.label.code(),
                e.length,
                e.sample_rate_hz
            ));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let err = |line: usize, reason: String| DatasetError::Manifest { line, reason };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, l)) if l.trim_end() == MAGIC_LINE => {}
            _ => return Err(err(1, format!("expected {MAGIC_LINE:?}"))),
        }
        let mut dataset_seed = None;
        let mut split_tag = None;
        let mut entries = Vec::new();
        let mut in_body = false;
        for (n, line) in lines {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if !in_body {
                if let Some(meta) = line.strip_prefix('#') {
                    let (key, value) = meta
                        .split_once(':')
                        .ok_or_else(|| err(n, "expected '# key: value'".into()))?;
                    match key.trim() {
                        "dataset_seed" => {
                            dataset_seed = Some(
                                value
                                    .trim()
                                    .parse::<u64>()
                                    .map_err(|e| err(n, format!("dataset_seed: {e}")))?,
                            )
                        }
                        "split" => split_tag = Some(value.trim().parse().map_err(|e| err(n, e))?),
                        other => return Err(err(n, format!("unknown key {other:?}"))),
                    }
                    continue;
                }
                if line != COLUMNS {
                    return Err(err(n, format!("expected column header {COLUMNS:?}")));
                }
                in_body = true;
                continue;
            }
            entries.push(parse_entry(line).map_err(|reason| err(n, reason))?);
        }
        if !in_body {
            return Err(err(1, "missing column header".into()));
        }
        let dataset_seed = dataset_seed.ok_or_else(|| err(1, "missing dataset_seed".into()))?;
        let mut manifest = Self::new(entries, dataset_seed)?;
        manifest.split_tag = split_tag;
        Ok(manifest)
    }

    pub fn load(path: &Path) -> Result<Self, DatasetError> {
        let bytes = read_file(path)?;
        let text = String::from_utf8(bytes).map_err(|_| DatasetError::Manifest {
            line: 0,
            reason: "not UTF-8".into(),
        })?;
        Self::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), DatasetError> {
        write_file(path, self.to_text().as_bytes())
    }
}

fn parse_entry(line: &str) -> Result<ManifestEntry, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 5 {
        return Err(format!(
            "expected 5 tab-separated fields, found {}",
            fields.len()
        ));
    }
    if fields[0].is_empty() {
        return Err("empty record id".into());
    }
    let code: u8 = fields[2].parse().map_err(|e| format!("label: {e}"))?;
    let label = Label::from_code(code).ok_or_else(|| format!("label code {code} not in 0..=3"))?;
    let length = fields[3].parse().map_err(|e| format!("length: {e}"))?;
    let sample_rate_hz: f64 = fields[4]
        .parse()
        .map_err(|e| format!("sample_rate_hz: {e}"))?;
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
        return Err(format!("sample rate {sample_rate_hz} must be positive"));
    }
    let path = PathBuf::from(fields[1]);
    if path.is_absolute() {
        return Err("paths must be relative to the manifest".into());
    }
    Ok(ManifestEntry {
        record_id: fields[0].to_string(),
        path,
        label,
        length,
        sample_rate_hz,
    })
}

fn path_to_text(path: &Path) -> String {
    path.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

/// Absolute location of an entry's file.
pub fn resolve(manifest_path: &Path, entry: &ManifestEntry) -> PathBuf {
    manifest_path
        .parent()
        .unwrap_or_else(|| Path::new(""))
        .join(&entry.path)
}

fn normalize(path: &Path) -> PathBuf {
    let absolute = path
        .canonicalize()
        .or_else(|_| std::path::absolute(path))
        .unwrap_or_else(|_| path.to_path_buf());
    let mut out = PathBuf::new();
    for component in absolute.components() {
        match component {
            Component::CurDir => {}
            Component::ParentDir => {
                out.pop();
            }
            other => out.push(other),
        }
    }
    out
}

/// `target` expressed relative to directory `base`.
pub fn relative_path(target: &Path, base: &Path) -> PathBuf {
    let target = normalize(target);
    let base = normalize(base);
    let t: Vec<_> = target.components().collect();
    let b: Vec<_> = base.components().collect();
    let common = t.iter().zip(&b).take_while(|(x, y)| x == y).count();
    let mut out = PathBuf::new();
    for _ in common..b.len() {
        out.push("..");
    }
    for c in &t[common..] {
        out.push(c);
    }
    out
}
