use std::path::PathBuf;

use clap::Args;
use ecg_augment::dataset;
use ecg_augment::parallel::parallel_map;
use ecg_augment::signal::{DEFAULT_DECIMATION, DEFAULT_DIVISOR, DEFAULT_TARGET_LEN, RAW_RATE_HZ};
use ecg_augment::{preprocess, PreprocessConfig};
use log::info;

use super::{load_manifest, save_manifest, write_containers, MANIFEST_FILE};
use crate::failure::{CmdResult, Failure};
use crate::Global;

#[derive(Args)]
pub struct PreprocessArgs {
    /// Raw manifest produced by `ingest`
    #[arg(long)]
    pub manifest: PathBuf,

    /// Directory for processed containers and their manifest
    #[arg(long)]
    pub out_dir: PathBuf,

    /// Processed manifest path [default: <out-dir>/manifest.tsv]
    #[arg(long)]
    pub out_manifest: Option<PathBuf>,

    /// Amplitude divisor applied to raw counts
    #[arg(long, default_value_t = DEFAULT_DIVISOR)]
    pub divisor: f64,

    /// Decimation factor
    #[arg(long, default_value_t = DEFAULT_DECIMATION)]
    pub factor: usize,

    /// Output length after head padding
    #[arg(long, default_value_t = DEFAULT_TARGET_LEN)]
    pub target_len: usize,

    /// Required raw sampling rate in Hz
    #[arg(long, default_value_t = RAW_RATE_HZ)]
    pub raw_rate: f64,

    /// Decimate without the anti-alias lowpass
    #[arg(long)]
    pub no_anti_alias: bool,
}

pub fn run(args: &PreprocessArgs, global: Global) -> CmdResult {
    let config = PreprocessConfig {
        divisor: args.divisor,
        factor: args.factor,
        anti_alias: !args.no_anti_alias,
        target_len: args.target_len,
        raw_rate_hz: Some(args.raw_rate),
    };
    if !(config.divisor.is_finite() && config.divisor != 0.0)
        || config.factor == 0
        || config.target_len == 0
    {
        return Err(Failure::input(
            "--divisor must be nonzero, --factor and --target-len positive",
        ));
    }
    let manifest = load_manifest(&args.manifest)?;
    // Processed manifests carry the output rate, so a second pass is refused.
    if let Some(entry) = manifest
        .entries()
        .iter()
        .find(|e| (e.sample_rate_hz - args.raw_rate).abs() > 1e-9 * args.raw_rate)
    {
        return Err(Failure::input(format!(
            "record {} is at {} Hz, expected raw {} Hz input; already preprocessed?",
            entry.record_id, entry.sample_rate_hz, args.raw_rate
        )));
    }

    let records = parallel_map(manifest.entries(), global.workers, |entry| {
        let raw = dataset::load_raw_record(&args.manifest, entry).map_err(|e| e.to_string())?;
        preprocess(&raw, &config).map_err(|e| format!("record {}: {e}", entry.record_id))
    })
    .map_err(Failure::input)?;

    let out_manifest = args
        .out_manifest
        .clone()
        .unwrap_or_else(|| args.out_dir.join(MANIFEST_FILE));
    let processed = write_containers(
        &records,
        &args.out_dir,
        &out_manifest,
        manifest.dataset_seed,
        global.workers,
    )?;
    save_manifest(&processed, &out_manifest)?;
    info!(
        "preprocessed {} records to length {} at {} Hz; manifest {}",
        processed.len(),
        config.target_len,
        args.raw_rate / config.factor as f64,
        out_manifest.display()
    );
    Ok(())
}
