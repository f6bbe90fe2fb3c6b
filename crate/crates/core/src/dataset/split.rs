//! Seeded train / validation / test partitioning.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::signal::Label;

use super::{DatasetError, DatasetManifest, ManifestEntry, SplitTag};

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    ratios: [f64; 3],
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    pub fn new(ratios: [f64; 3], seed: u64, stratified: bool) -> Result<Self, DatasetError> {
        if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(DatasetError::InvalidSplit(format!(
                "ratios {ratios:?} must all be positive"
            )));
        }
        let total: f64 = ratios.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(DatasetError::InvalidSplit(format!(
                "ratios {ratios:?} sum to {total}, not 1"
            )));
        }
        Ok(Self {
            ratios,
            seed,
            stratified,
        })
    }

    pub fn ratios(&self) -> [f64; 3] {
        self.ratios
    }

    /// Partition sizes for `n` items: round(r_train·n), round(r_val·n), rest.
    pub fn sizes(&self, n: usize) -> [usize; 3] {
        let train = round(self.ratios[0] * n as f64).min(n);
        let val = round(self.ratios[1] * n as f64).min(n - train);
        [train, val, n - train - val]
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            ratios: [0.6, 0.2, 0.2],
            seed: 0,
            stratified: false,
        }
    }
}

fn round(x: f64) -> usize {
    x.round_ties_even() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitManifests {
    pub train: DatasetManifest,
    pub val: DatasetManifest,
    pub test: DatasetManifest,
}

impl SplitManifests {
    pub fn get(&self, tag: SplitTag) -> &DatasetManifest {
        match tag {
            SplitTag::Train => &self.train,
            SplitTag::Val => &self.val,
            SplitTag::Test => &self.test,
        }
    }
}

fn shuffled(entries: Vec<&ManifestEntry>, seed: u64) -> Vec<&ManifestEntry> {
    let mut entries = entries;
    entries.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    entries
}

fn cut(entries: Vec<&ManifestEntry>, spec: &SplitSpec, parts: &mut [Vec<ManifestEntry>; 3]) {
    let [train, val, _] = spec.sizes(entries.len());
    for (i, e) in entries.into_iter().enumerate() {
        let part = if i < train {
            0
        } else if i < train + val {
            1
        } else {
            2
        };
        parts[part].push(e.clone());
    }
}

/// Shuffles with `spec.seed` and cuts into contiguous partitions. In
/// stratified mode every class is shuffled and cut separately, then the
/// per-class pieces are concatenated in label order.
pub fn split(manifest: &DatasetManifest, spec: &SplitSpec) -> Result<SplitManifests, DatasetError> {
    if manifest.is_empty() {
        return Err(DatasetError::EmptyManifest);
    }
    let mut parts: [Vec<ManifestEntry>; 3] = Default::default();
    if spec.stratified {
        for label in Label::ALL {
            let class: Vec<_> = manifest
                .entries()
                .iter()
                .filter(|e| e.label == label)
                .collect();
            let seed = spec
                .seed
                .wrapping_add(u64::from(label.code()).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            cut(shuffled(class, seed), spec, &mut parts);
        }
    } else {
        cut(
            shuffled(manifest.entries().iter().collect(), spec.seed),
            spec,
            &mut parts,
        );
    }
    for (tag, part) in SplitTag::ALL.iter().zip(&parts) {
        if part.is_empty() {
            return Err(DatasetError::EmptyPartition(*tag));
        }
    }
    let [train, val, test] = parts;
    let build = |entries, tag| DatasetManifest::new(entries, spec.seed).map(|m| m.with_split(tag));
    Ok(SplitManifests {
        train: build(train, SplitTag::Train)?,
        val: build(val, SplitTag::Val)?,
        test: build(test, SplitTag::Test)?,
    })
}
