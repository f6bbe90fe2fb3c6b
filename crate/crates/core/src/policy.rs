//! RandAugment-style composition: a policy `(M, N, op set, seed)` draws `N`
//! ops uniformly with replacement for every record, samples each op's
//! parameters at normalized magnitude `m = M / 30`, and applies them left to
//! right.
//!
//! Randomness flows from a per-record stream derived from
//! `(master_seed, epoch, record_id)`, so results never depend on scheduling.

use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ops::{AugmentError, Interval, OpKind, OpParams, Wave};
use crate::parallel::parallel_map;
use crate::signal::{Record, Shape};

pub const MAX_MAGNITUDE: u32 = 30;
pub const POLICY_FILE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("magnitude {0} outside [0, {MAX_MAGNITUDE}]")]
    MagnitudeOutOfRange(u32),
    #[error("op set is empty")]
    EmptyOpSet,
    #[error("op {0} listed more than once")]
    DuplicateOp(OpKind),
    #[error("invalid mapping constant {name}: {reason}")]
    InvalidMapping { name: &'static str, reason: String },
    #[error("unsupported policy file version {0}")]
    UnsupportedVersion(u32),
    #[error("malformed policy file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot read policy file: {0}")]
    Io(#[from] std::io::Error),
    #[error("record {record_id}: {source}")]
    Augment {
        record_id: String,
        #[source]
        source: AugmentError,
    },
}

/// Linear-in-`m` parameter ranges for every op. All ranges collapse to the
/// op's identity configuration at `m = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MagnitudeMapping {
    /// Scale factor ~ U[1 − s·m, 1 + s·m].
    pub scale_spread: f64,
    /// Drop probability = d·m.
    pub drop_prob_max: f64,
    /// Cutout length ~ U{0, …, round(c·m·T)}.
    pub cutout_max_fraction: f64,
    /// Shift offset ~ U{−round(s·m·T), …, round(s·m·T)}.
    pub shift_max_fraction: f64,
    /// Sine/square amplitude ~ U[0, a·m].
    pub wave_amplitude_max: f64,
    pub wave_freq_min_hz: f64,
    pub wave_freq_max_hz: f64,
    /// Partial-op interval length fraction ~ U[min, max].
    pub partial_min_fraction: f64,
    pub partial_max_fraction: f64,
    /// Noise sigma ~ U[0, σ·m].
    pub noise_sigma_max: f64,
    /// Lowpass cutoff = Nyquist · (1 − r·m).
    pub fir_low_reduction: f64,
    /// Highpass cutoff = max(floor, h·m), and 0 at m = 0.
    pub fir_high_max_hz: f64,
    pub fir_high_floor_hz: f64,
}

impl Default for MagnitudeMapping {
    fn default() -> Self {
        Self {
            scale_spread: 0.5,
            drop_prob_max: 0.1,
            cutout_max_fraction: 0.25,
            shift_max_fraction: 0.25,
            wave_amplitude_max: 0.5,
            wave_freq_min_hz: 0.1,
            wave_freq_max_hz: 3.0,
            partial_min_fraction: 0.1,
            partial_max_fraction: 0.5,
            noise_sigma_max: 0.3,
            fir_low_reduction: 0.8,
            fir_high_max_hz: 10.0,
            fir_high_floor_hz: 0.5,
        }
    }
}

impl MagnitudeMapping {
    pub fn validate(&self) -> Result<(), PolicyError> {
        let unit = |name: &'static str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(PolicyError::InvalidMapping {
                    name,
                    reason: format!("{v} not in [0, 1]"),
                })
            }
        };
        let non_negative = |name: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(PolicyError::InvalidMapping {
                    name,
                    reason: format!("{v} must be finite and non-negative"),
                })
            }
        };
        non_negative("scale_spread", self.scale_spread)?;
        unit("drop_prob_max", self.drop_prob_max)?;
        unit("cutout_max_fraction", self.cutout_max_fraction)?;
        unit("shift_max_fraction", self.shift_max_fraction)?;
        non_negative("wave_amplitude_max", self.wave_amplitude_max)?;
        non_negative("wave_freq_min_hz", self.wave_freq_min_hz)?;
        non_negative("wave_freq_max_hz", self.wave_freq_max_hz)?;
        if self.wave_freq_min_hz > self.wave_freq_max_hz {
            return Err(PolicyError::InvalidMapping {
                name: "wave_freq_min_hz",
                reason: "exceeds wave_freq_max_hz".into(),
            });
        }
        unit("partial_min_fraction", self.partial_min_fraction)?;
        unit("partial_max_fraction", self.partial_max_fraction)?;
        if self.partial_min_fraction > self.partial_max_fraction {
            return Err(PolicyError::InvalidMapping {
                name: "partial_min_fraction",
                reason: "exceeds partial_max_fraction".into(),
            });
        }
        non_negative("noise_sigma_max", self.noise_sigma_max)?;
        unit("fir_low_reduction", self.fir_low_reduction)?;
        if self.fir_low_reduction >= 1.0 {
            return Err(PolicyError::InvalidMapping {
                name: "fir_low_reduction",
                reason: "must be below 1".into(),
            });
        }
        non_negative("fir_high_max_hz", self.fir_high_max_hz)?;
        non_negative("fir_high_floor_hz", self.fir_high_floor_hz)?;
        Ok(())
    }
}

/// The augmentation hyperparameter bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentPolicy {
    magnitude: u32,
    num_ops: u32,
    op_set: Vec<OpKind>,
    master_seed: u64,
    mapping: MagnitudeMapping,
}

impl AugmentPolicy {
    pub fn new(
        magnitude: u32,
        num_ops: u32,
        op_set: Vec<OpKind>,
        master_seed: u64,
    ) -> Result<Self, PolicyError> {
        Self::with_mapping(
            magnitude,
            num_ops,
            op_set,
            master_seed,
            MagnitudeMapping::default(),
        )
    }

    pub fn with_mapping(
        magnitude: u32,
        num_ops: u32,
        op_set: Vec<OpKind>,
        master_seed: u64,
        mapping: MagnitudeMapping,
    ) -> Result<Self, PolicyError> {
        if magnitude > MAX_MAGNITUDE {
            return Err(PolicyError::MagnitudeOutOfRange(magnitude));
        }
        if op_set.is_empty() {
            return Err(PolicyError::EmptyOpSet);
        }
        for (i, kind) in op_set.iter().enumerate() {
            if op_set[..i].contains(kind) {
                return Err(PolicyError::DuplicateOp(*kind));
            }
        }
        mapping.validate()?;
        Ok(Self {
            magnitude,
            num_ops,
            op_set,
            master_seed,
            mapping,
        })
    }

    /// All thirteen ops.
    pub fn full(magnitude: u32, num_ops: u32, master_seed: u64) -> Result<Self, PolicyError> {
        Self::new(magnitude, num_ops, OpKind::ALL.to_vec(), master_seed)
    }

    pub fn magnitude(&self) -> u32 {
        self.magnitude
    }

    pub fn num_ops(&self) -> u32 {
        self.num_ops
    }

    pub fn op_set(&self) -> &[OpKind] {
        &self.op_set
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn mapping(&self) -> &MagnitudeMapping {
        &self.mapping
    }

    pub fn from_toml_str(text: &str) -> Result<Self, PolicyError> {
        let file: PolicyFile = toml::from_str(text)?;
        if file.version != POLICY_FILE_VERSION {
            return Err(PolicyError::UnsupportedVersion(file.version));
        }
        Self::with_mapping(
            file.magnitude,
            file.num_ops,
            file.op_set.unwrap_or_else(|| OpKind::ALL.to_vec()),
            file.master_seed,
            file.mapping.unwrap_or_default(),
        )
    }

    pub fn load(path: &Path) -> Result<Self, PolicyError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        let file = PolicyFile {
            version: POLICY_FILE_VERSION,
            magnitude: self.magnitude,
            num_ops: self.num_ops,
            master_seed: self.master_seed,
            op_set: Some(self.op_set.clone()),
            mapping: Some(self.mapping.clone()),
        };
        toml::to_string(&file).expect("policy serializes to TOML")
    }

    /// Short stable digest of the policy, recorded in batch headers.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_toml_string().as_bytes());
        hex::encode(&digest[..8])
    }
}

/// On-disk policy document.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicyFile {
    version: u32,
    magnitude: u32,
    num_ops: u32,
    master_seed: u64,
    #[serde(default)]
    op_set: Option<Vec<OpKind>>,
    #[serde(default)]
    mapping: Option<MagnitudeMapping>,
}

/// Counter-based pseudorandom stream bound to one derivation path.
#[derive(Debug, Clone)]
pub struct RngStream(ChaCha8Rng);

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Derives the stream for `(master_seed, epoch, record_id)`.
pub fn derive_stream(master_seed: u64, epoch: u64, record_id: &str) -> RngStream {
    let mut state = master_seed;
    let a = splitmix64(&mut state);
    state = a ^ epoch;
    let b = splitmix64(&mut state);
    state = b ^ fnv1a64(record_id.as_bytes());
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    RngStream(ChaCha8Rng::from_seed(seed))
}

fn uniform(stream: &mut RngStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * stream.random::<f64>()
}

fn round_count(x: f64) -> usize {
    x.round_ties_even().max(0.0) as usize
}

fn partial_interval(len: usize, mapping: &MagnitudeMapping, stream: &mut RngStream) -> Interval {
    let fraction = uniform(
        stream,
        mapping.partial_min_fraction,
        mapping.partial_max_fraction,
    );
    let width = round_count(fraction * len as f64).min(len);
    let start = stream.random_range(0..=len - width);
    Interval::new(start, width)
}

fn sample_wave(m: f64, mapping: &MagnitudeMapping, stream: &mut RngStream) -> Wave {
    Wave {
        amplitude: uniform(stream, 0.0, mapping.wave_amplitude_max * m),
        freq_hz: uniform(stream, mapping.wave_freq_min_hz, mapping.wave_freq_max_hz),
        phase_rad: uniform(stream, 0.0, TAU),
    }
}

/// Draws concrete parameters for `kind` at magnitude `magnitude` (0..=30).
///
/// At magnitude 0 every kind returns its identity configuration.
pub fn sample_params(
    kind: OpKind,
    magnitude: u32,
    shape: Shape,
    mapping: &MagnitudeMapping,
    stream: &mut RngStream,
) -> OpParams {
    let m = f64::from(magnitude.min(MAX_MAGNITUDE)) / f64::from(MAX_MAGNITUDE);
    if m == 0.0 {
        return OpParams::identity(kind, shape.sample_rate_hz);
    }
    let len = shape.len;
    let nyquist = shape.sample_rate_hz / 2.0;
    match kind {
        OpKind::Erase => OpParams::Erase {
            lead: Some(stream.random_range(0..shape.leads)),
        },
        OpKind::Scale => {
            let spread = mapping.scale_spread * m;
            OpParams::Scale {
                factor: uniform(stream, 1.0 - spread, 1.0 + spread),
            }
        }
        OpKind::Flip => OpParams::Flip { active: true },
        OpKind::Drop => OpParams::Drop {
            prob: mapping.drop_prob_max * m,
            seed: stream.next_u64(),
        },
        OpKind::Cutout => {
            let max_len = round_count(mapping.cutout_max_fraction * m * len as f64).min(len);
            let width = stream.random_range(0..=max_len);
            let start = stream.random_range(0..=len - width);
            OpParams::Cutout(Interval::new(start, width))
        }
        OpKind::Shift => {
            let reach = round_count(mapping.shift_max_fraction * m * len as f64) as i64;
            OpParams::Shift {
                offset: stream.random_range(-reach..=reach),
            }
        }
        OpKind::Sine => OpParams::Sine(sample_wave(m, mapping, stream)),
        OpKind::Square => OpParams::Square(sample_wave(m, mapping, stream)),
        OpKind::PartialSine => {
            let wave = sample_wave(m, mapping, stream);
            OpParams::PartialSine {
                wave,
                interval: partial_interval(len, mapping, stream),
            }
        }
        OpKind::PartialSquare => {
            let wave = sample_wave(m, mapping, stream);
            OpParams::PartialSquare {
                wave,
                interval: partial_interval(len, mapping, stream),
            }
        }
        OpKind::PartialWhiteNoise => {
            let interval = partial_interval(len, mapping, stream);
            OpParams::PartialWhiteNoise {
                interval,
                sigma: uniform(stream, 0.0, mapping.noise_sigma_max * m),
                seed: stream.next_u64(),
            }
        }
        OpKind::FirLow => OpParams::FirLow {
            cutoff_hz: nyquist * (1.0 - mapping.fir_low_reduction * m),
        },
        OpKind::FirHigh => OpParams::FirHigh {
            // Keep the highpass design valid at low sample rates.
            cutoff_hz: (mapping.fir_high_max_hz * m)
                .max(mapping.fir_high_floor_hz)
                .min(0.9 * nyquist),
        },
    }
}

/// The ops (with concrete parameters) that `apply_policy` would run on
/// `record` for `epoch`, in application order.
pub fn plan(record: &Record, policy: &AugmentPolicy, epoch: u64) -> Vec<OpParams> {
    let mut stream = derive_stream(policy.master_seed, epoch, &record.id);
    let shape = record.signal.shape();
    (0..policy.num_ops)
        .map(|_| {
            let kind = policy.op_set[stream.random_range(0..policy.op_set.len())];
            sample_params(kind, policy.magnitude, shape, &policy.mapping, &mut stream)
        })
        .collect()
}

/// Applies `policy` to one record. Id and label are preserved.
pub fn apply_policy(
    record: &Record,
    policy: &AugmentPolicy,
    epoch: u64,
) -> Result<Record, PolicyError> {
    let mut signal = record.signal.clone();
    for params in plan(record, policy, epoch) {
        signal = params
            .apply(&signal)
            .map_err(|source| PolicyError::Augment {
                record_id: record.id.clone(),
                source,
            })?;
    }
    Ok(Record {
        id: record.id.clone(),
        signal,
        label: record.label,
    })
}

/// `apply_policy` over a dataset on `workers` threads. The output is
/// independent of the worker count.
pub fn augment_dataset(
    records: &[Record],
    policy: &AugmentPolicy,
    epoch: u64,
    workers: usize,
) -> Result<Vec<Record>, PolicyError> {
    parallel_map(records, workers, |r| apply_policy(r, policy, epoch))
}
