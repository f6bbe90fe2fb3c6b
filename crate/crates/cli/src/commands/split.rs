use std::path::PathBuf;

use clap::Args;
use ecg_augment::dataset::{manifest, split, DatasetManifest, ManifestEntry, SplitSpec, SplitTag};
use log::info;

use super::{create_dir, load_manifest, relative_to_manifest, save_manifest};
use crate::failure::{Classify, CmdResult};
use crate::Global;

#[derive(Args)]
pub struct SplitArgs {
    /// Manifest to partition
    #[arg(long)]
    pub manifest: PathBuf,

    /// Directory for train.tsv, val.tsv and test.tsv
    #[arg(long)]
    pub out_dir: PathBuf,

    /// Train, validation and test ratios; must sum to 1
    #[arg(long, default_value = "0.6,0.2,0.2", value_parser = parse_ratios)]
    pub ratios: [f64; 3],

    /// Shuffle and cut each class separately
    #[arg(long)]
    pub stratified: bool,
}

pub fn run(args: &SplitArgs, global: Global) -> CmdResult {
    let ratios = args.ratios;
    // Seed is only known after reading the manifest; check ratios first.
    SplitSpec::new(ratios, 0, args.stratified).input("invalid --ratios")?;
    let source = load_manifest(&args.manifest)?;
    let seed = global.seed.unwrap_or(source.dataset_seed);
    let spec = SplitSpec::new(ratios, seed, args.stratified).input("invalid --ratios")?;
    let parts = split(&source, &spec).input("splitting manifest")?;

    create_dir(&args.out_dir)?;
    for tag in SplitTag::ALL {
        let out = args.out_dir.join(format!("{tag}.tsv"));
        let entries: Vec<ManifestEntry> = parts
            .get(tag)
            .entries()
            .iter()
            .map(|e| ManifestEntry {
                path: relative_to_manifest(&manifest::resolve(&args.manifest, e), &out),
                ..e.clone()
            })
            .collect();
        let rebased = DatasetManifest::new(entries, seed)
            .internal("rebasing split")?
            .with_split(tag);
        save_manifest(&rebased, &out)?;
        info!("{tag}: {} records -> {}", rebased.len(), out.display());
    }
    Ok(())
}

fn parse_ratios(text: &str) -> Result<[f64; 3], String> {
    let values = text
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    values
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected three comma-separated ratios, got {}", v.len()))
}
