use std::path::PathBuf;

use clap::Args;
use ecg_augment::dataset::load_record;
use ecg_augment::{apply_policy, plot};

use super::{create_parent, load_manifest, load_policy};
use crate::failure::{Classify, CmdResult, Failure};
use crate::Global;

#[derive(Args)]
pub struct RenderArgs {
    /// Manifest containing the record
    #[arg(long)]
    pub manifest: PathBuf,

    /// Record id to draw
    #[arg(long)]
    pub record: String,

    /// Overlay the record augmented by this policy
    #[arg(long)]
    pub policy: Option<PathBuf>,

    /// Epoch used for the overlay draw
    #[arg(long, default_value_t = 0)]
    pub epoch: u64,

    /// SVG file to write
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &RenderArgs, global: Global) -> CmdResult {
    let policy = args
        .policy
        .as_deref()
        .map(|p| load_policy(p, global.seed))
        .transpose()?;
    let manifest = load_manifest(&args.manifest)?;
    let entry = manifest.get(&args.record).ok_or_else(|| {
        Failure::input(format!(
            "record {} not in {}",
            args.record,
            args.manifest.display()
        ))
    })?;
    let record = load_record(&args.manifest, entry).input(format!("loading {}", args.record))?;
    let overlay = match &policy {
        Some(policy) => Some(apply_policy(&record, policy, args.epoch).input("augmenting")?),
        None => None,
    };
    let title = match &policy {
        Some(p) => format!(
            "{} (M={}, N={}, epoch {})",
            record.id,
            p.magnitude(),
            p.num_ops(),
            args.epoch
        ),
        None => record.id.clone(),
    };
    let svg = plot::render_svg(&title, &record.signal, overlay.as_ref().map(|r| &r.signal));
    create_parent(&args.out)?;
    std::fs::write(&args.out, svg).input(format!("writing {}", args.out.display()))
}
