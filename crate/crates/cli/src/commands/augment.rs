use std::path::PathBuf;

use clap::Args;
use ecg_augment::augment_dataset;
use ecg_augment::dataset::write_batch;
use log::info;

use super::{
    create_parent, load_manifest, load_policy, load_records, save_manifest, write_containers,
    MANIFEST_FILE,
};
use crate::failure::{Classify, CmdResult};
use crate::Global;

#[derive(Args)]
#[command(group = clap::ArgGroup::new("output").required(true).multiple(true).args(["out", "containers"]))]
pub struct AugmentArgs {
    /// Preprocessed manifest
    #[arg(long)]
    pub manifest: PathBuf,

    /// Policy file; without one records pass through unchanged
    #[arg(long)]
    pub policy: Option<PathBuf>,

    /// Epoch index mixed into every record's random stream
    #[arg(long, default_value_t = 0)]
    pub epoch: u64,

    /// Batch file to write
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Directory for one container per augmented record plus a manifest
    #[arg(long)]
    pub containers: Option<PathBuf>,
}

pub fn run(args: &AugmentArgs, global: Global) -> CmdResult {
    let policy = args
        .policy
        .as_deref()
        .map(|p| load_policy(p, global.seed))
        .transpose()?;
    let manifest = load_manifest(&args.manifest)?;
    let records = load_records(&args.manifest, &manifest, global.workers)?;
    let (records, fingerprint) = match &policy {
        Some(policy) => {
            let augmented = augment_dataset(&records, policy, args.epoch, global.workers)
                .input("augmenting")?;
            info!(
                "applied M={} N={} over {} ops, epoch {}",
                policy.magnitude(),
                policy.num_ops(),
                policy.op_set().len(),
                args.epoch
            );
            (augmented, Some(policy.fingerprint()))
        }
        None => (records, None),
    };

    if let Some(out) = &args.out {
        create_parent(out)?;
        write_batch(out, &records, fingerprint.as_deref())
            .input(format!("writing batch {}", out.display()))?;
        info!("wrote {} records to {}", records.len(), out.display());
    }
    if let Some(dir) = &args.containers {
        let path = dir.join(MANIFEST_FILE);
        let written =
            write_containers(&records, dir, &path, manifest.dataset_seed, global.workers)?;
        save_manifest(&written, &path)?;
        info!("wrote {} containers to {}", written.len(), dir.display());
    }
    Ok(())
}
