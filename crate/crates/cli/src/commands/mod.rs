pub mod augment;
pub mod ingest;
pub mod preprocess;
pub mod render;
pub mod score;
pub mod split;

use std::path::{Path, PathBuf};

use ecg_augment::dataset::{self, DatasetManifest, ManifestEntry};
use ecg_augment::parallel::parallel_map;
use ecg_augment::{AugmentPolicy, Record};

use crate::failure::{Classify, CmdResult, Failure};

pub const MANIFEST_FILE: &str = "manifest.tsv";

pub fn load_manifest(path: &Path) -> CmdResult<DatasetManifest> {
    let manifest =
        DatasetManifest::load(path).input(format!("reading manifest {}", path.display()))?;
    if manifest.is_empty() {
        return Err(Failure::input(format!(
            "manifest {} has no records",
            path.display()
        )));
    }
    Ok(manifest)
}

pub fn save_manifest(manifest: &DatasetManifest, path: &Path) -> CmdResult {
    create_parent(path)?;
    manifest
        .save(path)
        .input(format!("writing manifest {}", path.display()))
}

pub fn create_dir(dir: &Path) -> CmdResult {
    std::fs::create_dir_all(dir).input(format!("creating {}", dir.display()))
}

pub fn create_parent(path: &Path) -> CmdResult {
    match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => create_dir(parent),
        _ => Ok(()),
    }
}

/// Policy file, with its master seed replaced when `seed` is given.
pub fn load_policy(path: &Path, seed: Option<u64>) -> CmdResult<AugmentPolicy> {
    let policy = AugmentPolicy::load(path).input(format!("reading policy {}", path.display()))?;
    match seed {
        None => Ok(policy),
        Some(seed) => AugmentPolicy::with_mapping(
            policy.magnitude(),
            policy.num_ops(),
            policy.op_set().to_vec(),
            seed,
            policy.mapping().clone(),
        )
        .internal("reseeding policy"),
    }
}

/// Normalized records in manifest order.
pub fn load_records(
    manifest_path: &Path,
    manifest: &DatasetManifest,
    workers: usize,
) -> CmdResult<Vec<Record>> {
    parallel_map(manifest.entries(), workers, |entry| {
        dataset::load_record(manifest_path, entry)
    })
    .input("loading records")
}

/// Entry pointing at `file`, with its path expressed relative to the
/// directory that will hold `manifest_path`.
pub fn entry_for(record: &Record, file: &Path, manifest_path: &Path) -> ManifestEntry {
    ManifestEntry {
        record_id: record.id.clone(),
        path: relative_to_manifest(file, manifest_path),
        label: record
            .label
            .expect("records loaded from a manifest are labeled"),
        length: record.signal.len(),
        sample_rate_hz: record.signal.sample_rate_hz(),
    }
}

pub fn relative_to_manifest(file: &Path, manifest_path: &Path) -> PathBuf {
    let base = manifest_path.parent().unwrap_or_else(|| Path::new(""));
    let base = if base.as_os_str().is_empty() {
        Path::new(".")
    } else {
        base
    };
    dataset::manifest::relative_path(file, base)
}

/// Writes every record as `<dir>/<id>.mat` and returns a manifest whose
/// paths are relative to `manifest_path`.
pub fn write_containers(
    records: &[Record],
    dir: &Path,
    manifest_path: &Path,
    dataset_seed: u64,
    workers: usize,
) -> CmdResult<DatasetManifest> {
    create_dir(dir)?;
    create_parent(manifest_path)?;
    let entries = parallel_map(records, workers, |record| {
        let file = dir.join(format!("{}.mat", record.id));
        dataset::save_record(&file, record).map(|()| entry_for(record, &file, manifest_path))
    })
    .input("writing containers")?;
    DatasetManifest::new(entries, dataset_seed).internal("building manifest")
}
