use std::path::PathBuf;

use clap::Args;
use ecg_augment::dataset::load_labels;
use ecg_augment::score::score_predictions;
use log::info;

use super::{create_parent, load_manifest};
use crate::failure::{Classify, CmdResult};

#[derive(Args)]
pub struct ScoreArgs {
    /// Two-column CSV of record id and predicted class letter
    #[arg(long)]
    pub predictions: PathBuf,

    /// Manifest holding the reference labels
    #[arg(long)]
    pub manifest: PathBuf,

    /// Also write the report as JSON to this path
    #[arg(long)]
    pub json: Option<PathBuf>,
}

pub fn run(args: &ScoreArgs) -> CmdResult {
    let bytes = std::fs::read(&args.predictions)
        .input(format!("reading {}", args.predictions.display()))?;
    let predictions =
        load_labels(&bytes).input(format!("parsing {}", args.predictions.display()))?;
    let manifest = load_manifest(&args.manifest)?;
    let report = score_predictions(&predictions, &manifest).input("scoring")?;
    print!("{}", report.to_text());
    if let Some(path) = &args.json {
        create_parent(path)?;
        std::fs::write(path, report.to_json()).input(format!("writing {}", path.display()))?;
    }
    info!(
        "scored {} records: {:.4}",
        manifest.len(),
        report.final_score
    );
    Ok(())
}
