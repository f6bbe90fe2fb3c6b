use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use ecg_augment::dataset::{self, labels, DatasetManifest, ManifestEntry};
use ecg_augment::parallel::parallel_map;
use ecg_augment::signal::RAW_RATE_HZ;
use ecg_augment::Label;
use log::{error, info, warn};

use super::{relative_to_manifest, save_manifest};
use crate::failure::{Classify, CmdResult, Failure};
use crate::Global;

#[derive(Args)]
pub struct IngestArgs {
    /// Directory searched recursively for `<record_id>.<ext>` containers
    #[arg(long)]
    pub raw_dir: PathBuf,

    /// Two-column CSV of record id and class letter (N, A, O, ~)
    #[arg(long)]
    pub labels: PathBuf,

    /// Manifest to write
    #[arg(long)]
    pub out: PathBuf,

    /// Container file extension
    #[arg(long, default_value = "mat")]
    pub ext: String,

    /// Sampling rate of the raw recordings in Hz
    #[arg(long, default_value_t = RAW_RATE_HZ)]
    pub rate: f64,
}

pub fn run(args: &IngestArgs, global: Global) -> CmdResult {
    if !(args.rate.is_finite() && args.rate > 0.0) {
        return Err(Failure::input(format!(
            "--rate must be positive, got {}",
            args.rate
        )));
    }
    let bytes =
        std::fs::read(&args.labels).input(format!("reading labels {}", args.labels.display()))?;
    let labels =
        labels::load_labels(&bytes).input(format!("parsing labels {}", args.labels.display()))?;

    let mut files = Vec::new();
    collect_files(&args.raw_dir, &args.ext, &mut files)?;
    files.sort();
    if files.is_empty() {
        return Err(Failure::input(format!(
            "no .{} containers found in {}",
            args.ext,
            args.raw_dir.display()
        )));
    }

    let mut by_id: BTreeMap<String, &Path> = BTreeMap::new();
    for file in &files {
        let id = record_id(file)?;
        if let Some(first) = by_id.insert(id.clone(), file) {
            return Err(Failure::input(format!(
                "duplicate record id {id}: {} and {}",
                first.display(),
                file.display()
            )));
        }
    }

    let jobs: Vec<(String, &Path)> = by_id.into_iter().collect();
    let outcomes: Vec<Result<ManifestEntry, String>> =
        parallel_map(&jobs, global.workers, |(id, file)| {
            Ok::<_, std::convert::Infallible>(inspect(id, file, &labels, args))
        })
        .unwrap_or_else(|never| match never {});

    let mut entries = Vec::with_capacity(outcomes.len());
    let mut failures = 0usize;
    for outcome in outcomes {
        match outcome {
            Ok(entry) => entries.push(entry),
            Err(message) => {
                error!("{message}");
                failures += 1;
            }
        }
    }
    if failures > 0 {
        return Err(Failure::input(format!(
            "{failures} of {} files could not be ingested",
            jobs.len()
        )));
    }
    let unmatched = labels.len() - entries.len();
    if unmatched > 0 {
        warn!("{unmatched} labeled records have no container");
    }

    let manifest =
        DatasetManifest::new(entries, global.seed.unwrap_or(0)).input("building manifest")?;
    save_manifest(&manifest, &args.out)?;
    info!("wrote {} ({} records)", args.out.display(), manifest.len());
    eprintln!("{}", summary(&manifest));
    Ok(())
}

pub fn summary(manifest: &DatasetManifest) -> String {
    let counts = manifest.class_counts();
    let parts: Vec<String> = Label::ALL
        .iter()
        .zip(counts)
        .map(|(label, n)| format!("{label}={n}"))
        .collect();
    format!("{} records: {}", manifest.len(), parts.join(" "))
}

fn record_id(file: &Path) -> CmdResult<String> {
    file.file_stem()
        .and_then(|s| s.to_str())
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .ok_or_else(|| Failure::input(format!("cannot derive a record id from {}", file.display())))
}

fn inspect(
    id: &str,
    file: &Path,
    labels: &BTreeMap<String, Label>,
    args: &IngestArgs,
) -> Result<ManifestEntry, String> {
    let label = *labels
        .get(id)
        .ok_or_else(|| format!("{}: record {id} has no label", file.display()))?;
    let matrix = dataset::load_matrix(file).map_err(|e| format!("{}: {e}", file.display()))?;
    if matrix.rows == 0 || matrix.cols == 0 {
        return Err(format!("{}: empty signal matrix", file.display()));
    }
    Ok(ManifestEntry {
        record_id: id.to_owned(),
        path: relative_to_manifest(file, &args.out),
        label,
        length: matrix.cols,
        sample_rate_hz: args.rate,
    })
}

fn collect_files(dir: &Path, ext: &str, out: &mut Vec<PathBuf>) -> CmdResult {
    let listing = std::fs::read_dir(dir).input(format!("reading directory {}", dir.display()))?;
    for item in listing {
        let path = item
            .input(format!("reading directory {}", dir.display()))?
            .path();
        if path.is_dir() {
            collect_files(&path, ext, out)?;
        } else if path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case(ext))
        {
            out.push(path);
        }
    }
    Ok(())
}
