//! Randomized augmentation, preprocessing and scoring for single-lead ECG
//! rhythm classification.
//!
//! The pipeline turns raw 300 Hz challenge recordings into fixed-length
//! 50 Hz signals ([`signal::preprocess`]), expands them with a seeded
//! RandAugment-style policy over thirteen waveform transforms
//! ([`policy::apply_policy`]), hands batches to a trainer
//! ([`dataset::batch`]) and scores predictions with the challenge rule
//! ([`score::challenge_score`]).

pub mod dataset;
pub mod fir;
pub mod ops;
pub mod parallel;
pub mod plot;
pub mod policy;
pub mod score;
pub mod signal;

pub use ops::{OpKind, OpParams};
pub use policy::{apply_policy, augment_dataset, derive_stream, AugmentPolicy, RngStream};
pub use signal::{preprocess, Label, PreprocessConfig, RawRecord, RawSignal, Record, Signal};
