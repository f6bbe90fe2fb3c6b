//! Waveform types and the fixed preprocessing chain applied to raw challenge
//! recordings: scale by the dynamic-range divisor, decimate 300 Hz to 50 Hz,
//! then zero-pad the head to a common length.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fir::{self, FirError};

/// Dynamic-range divisor applied to raw ADC counts.
pub const DEFAULT_DIVISOR: f64 = 500.0;
/// Raw recordings are sampled at 300 Hz.
pub const RAW_RATE_HZ: f64 = 300.0;
/// 300 Hz / 6 = 50 Hz.
pub const DEFAULT_DECIMATION: usize = 6;
/// Longest record (61 s) at 50 Hz.
pub const DEFAULT_TARGET_LEN: usize = 3050;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("signal has no leads")]
    NoLeads,
    #[error("signal has no samples")]
    NoSamples,
    #[error("lead {lead} has {found} samples, expected {expected}")]
    RaggedLeads {
        lead: usize,
        expected: usize,
        found: usize,
    },
    #[error("sample rate must be positive and finite, got {0}")]
    InvalidRate(f64),
    #[error("non-finite sample at lead {lead}, index {index}")]
    NonFinite { lead: usize, index: usize },
    #[error("divisor must be positive and finite, got {0}")]
    InvalidDivisor(f64),
    #[error("decimation factor must be at least 1")]
    ZeroFactor,
    #[error("signal length {len} exceeds target length {target}")]
    TooLong { len: usize, target: usize },
    #[error("target length must be at least 1")]
    ZeroTarget,
    #[error("expected a {expected} Hz recording, got {found} Hz")]
    RateMismatch { expected: f64, found: f64 },
    #[error("record id must be non-empty")]
    EmptyId,
    #[error(transparent)]
    Filter(#[from] FirError),
}

/// Rhythm class of a record. Integer codes follow declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Normal = 0,
    AF = 1,
    Other = 2,
    Noisy = 3,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::Normal, Label::AF, Label::Other, Label::Noisy];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Label> {
        Label::ALL.get(code as usize).copied()
    }

    /// Single-character code used by the challenge reference files.
    pub fn letter(self) -> char {
        match self {
            Label::Normal => 'N',
            Label::AF => 'A',
            Label::Other => 'O',
            Label::Noisy => '~',
        }
    }

    pub fn from_letter(s: &str) -> Option<Label> {
        match s {
            "N" => Some(Label::Normal),
            "A" => Some(Label::AF),
            "O" => Some(Label::Other),
            "~" => Some(Label::Noisy),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Label::Normal => "Normal",
            Label::AF => "AF",
            Label::Other => "Other",
            Label::Noisy => "Noisy",
        };
        f.write_str(name)
    }
}

/// Leads, length and rate of a signal, without the samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shape {
    pub leads: usize,
    pub len: usize,
    pub sample_rate_hz: f64,
}

/// A multi-lead waveform in normalized amplitude units.
///
/// Every lead has the same length, the rate is positive and all samples are
/// finite. Values are immutable once constructed; transforms return new
/// signals.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    sample_rate_hz: f64,
    leads: Vec<Vec<f32>>,
}

impl Signal {
    pub fn new(sample_rate_hz: f64, leads: Vec<Vec<f32>>) -> Result<Self, SignalError> {
        check_rate(sample_rate_hz)?;
        let expected = check_shape(&leads)?;
        for (lead, samples) in leads.iter().enumerate() {
            if samples.len() != expected {
                return Err(SignalError::RaggedLeads {
                    lead,
                    expected,
                    found: samples.len(),
                });
            }
            if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
                return Err(SignalError::NonFinite { lead, index });
            }
        }
        Ok(Self {
            sample_rate_hz,
            leads,
        })
    }

    pub fn single_lead(sample_rate_hz: f64, samples: Vec<f32>) -> Result<Self, SignalError> {
        Self::new(sample_rate_hz, vec![samples])
    }

    pub fn zeros(sample_rate_hz: f64, leads: usize, len: usize) -> Result<Self, SignalError> {
        Self::new(sample_rate_hz, vec![vec![0.0; len]; leads])
    }

    /// Trusted constructor for transforms that preserve the invariants by
    /// construction (same rate and shape as a validated input, bounded
    /// arithmetic).
    pub(crate) fn from_parts(sample_rate_hz: f64, leads: Vec<Vec<f32>>) -> Self {
        debug_assert!(Self::new(sample_rate_hz, leads.clone()).is_ok());
        Self {
            sample_rate_hz,
            leads,
        }
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn num_leads(&self) -> usize {
        self.leads.len()
    }

    /// Samples per lead.
    pub fn len(&self) -> usize {
        self.leads[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Shape {
        Shape {
            leads: self.num_leads(),
            len: self.len(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    pub fn lead(&self, index: usize) -> Option<&[f32]> {
        self.leads.get(index).map(Vec::as_slice)
    }

    pub fn leads(&self) -> &[Vec<f32>] {
        &self.leads
    }

    pub fn into_leads(self) -> Vec<Vec<f32>> {
        self.leads
    }

    /// Duration in seconds.
    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sample_rate_hz
    }
}

/// A waveform as stored on disk: integer ADC counts (or raw doubles), possibly
/// containing non-finite values that `scale_raw` rejects.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSignal {
    pub sample_rate_hz: f64,
    pub leads: Vec<Vec<f64>>,
}

impl RawSignal {
    pub fn single_lead(sample_rate_hz: f64, samples: Vec<f64>) -> Self {
        Self {
            sample_rate_hz,
            leads: vec![samples],
        }
    }
}

impl From<&Signal> for RawSignal {
    fn from(signal: &Signal) -> Self {
        Self {
            sample_rate_hz: signal.sample_rate_hz,
            leads: signal
                .leads
                .iter()
                .map(|lead| lead.iter().map(|&v| f64::from(v)).collect())
                .collect(),
        }
    }
}

/// The dataset atom: an identified signal with an optional rhythm label.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub id: String,
    pub signal: Signal,
    pub label: Option<Label>,
}

impl Record {
    pub fn new(
        id: impl Into<String>,
        signal: Signal,
        label: Option<Label>,
    ) -> Result<Self, SignalError> {
        let id = id.into();
        if id.is_empty() {
            return Err(SignalError::EmptyId);
        }
        Ok(Self { id, signal, label })
    }
}

/// A record before preprocessing.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub id: String,
    pub signal: RawSignal,
    pub label: Option<Label>,
}

fn check_rate(rate: f64) -> Result<(), SignalError> {
    if rate.is_finite() && rate > 0.0 {
        Ok(())
    } else {
        Err(SignalError::InvalidRate(rate))
    }
}

fn check_shape<T>(leads: &[Vec<T>]) -> Result<usize, SignalError> {
    let first = leads.first().ok_or(SignalError::NoLeads)?;
    if first.is_empty() {
        return Err(SignalError::NoSamples);
    }
    Ok(first.len())
}

/// Divides every raw sample by `divisor`, producing 32-bit normalized samples.
pub fn scale_raw(raw: &RawSignal, divisor: f64) -> Result<Signal, SignalError> {
    if !(divisor.is_finite() && divisor > 0.0) {
        return Err(SignalError::InvalidDivisor(divisor));
    }
    check_rate(raw.sample_rate_hz)?;
    let expected = check_shape(&raw.leads)?;
    let mut leads = Vec::with_capacity(raw.leads.len());
    for (lead, samples) in raw.leads.iter().enumerate() {
        if samples.len() != expected {
            return Err(SignalError::RaggedLeads {
                lead,
                expected,
                found: samples.len(),
            });
        }
        let mut out = Vec::with_capacity(samples.len());
        for (index, &v) in samples.iter().enumerate() {
            let scaled = (v / divisor) as f32;
            if !v.is_finite() || !scaled.is_finite() {
                return Err(SignalError::NonFinite { lead, index });
            }
            out.push(scaled);
        }
        leads.push(out);
    }
    Ok(Signal::from_parts(raw.sample_rate_hz, leads))
}

/// Number of taps of the anti-alias lowpass for a given decimation factor.
pub fn anti_alias_taps(factor: usize) -> usize {
    16 * factor + 1
}

/// Anti-alias lowpass used ahead of index selection.
///
/// The passband extends to 0.4 × the output rate; the windowed-sinc cutoff
/// (its −6 dB point) sits at the output Nyquist frequency, so content that
/// would fold back into the passband is removed.
pub fn anti_alias_filter(input_rate_hz: f64, factor: usize) -> Result<fir::FirFilter, FirError> {
    let output_rate = input_rate_hz / factor as f64;
    fir::design_lowpass(output_rate / 2.0, input_rate_hz, anti_alias_taps(factor))
}

/// Keeps every `factor`-th sample, optionally after anti-alias filtering.
pub fn decimate(signal: &Signal, factor: usize, anti_alias: bool) -> Result<Signal, SignalError> {
    if factor == 0 {
        return Err(SignalError::ZeroFactor);
    }
    if factor == 1 {
        return Ok(signal.clone());
    }
    let filtered;
    let source = if anti_alias {
        let filter = anti_alias_filter(signal.sample_rate_hz, factor)?;
        filtered = fir::convolve_same(signal, &filter)?;
        &filtered
    } else {
        signal
    };
    let leads = source
        .leads
        .iter()
        .map(|lead| lead.iter().step_by(factor).copied().collect())
        .collect();
    Ok(Signal::from_parts(
        signal.sample_rate_hz / factor as f64,
        leads,
    ))
}

/// Prepends zeros until the signal is exactly `target_len` samples long.
pub fn pad_head(signal: &Signal, target_len: usize) -> Result<Signal, SignalError> {
    if target_len == 0 {
        return Err(SignalError::ZeroTarget);
    }
    let len = signal.len();
    if len > target_len {
        return Err(SignalError::TooLong {
            len,
            target: target_len,
        });
    }
    let pad = target_len - len;
    let leads = signal
        .leads
        .iter()
        .map(|lead| {
            let mut out = vec![0.0f32; pad];
            out.extend_from_slice(lead);
            out
        })
        .collect();
    Ok(Signal::from_parts(signal.sample_rate_hz, leads))
}

/// Settings for [`preprocess`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub divisor: f64,
    pub factor: usize,
    pub anti_alias: bool,
    pub target_len: usize,
    /// Rate the raw input must have; `None` accepts any rate.
    pub raw_rate_hz: Option<f64>,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            divisor: DEFAULT_DIVISOR,
            factor: DEFAULT_DECIMATION,
            anti_alias: true,
            target_len: DEFAULT_TARGET_LEN,
            raw_rate_hz: Some(RAW_RATE_HZ),
        }
    }
}

/// Scale, decimate, then pad. Id and label pass through unchanged.
pub fn preprocess(record: &RawRecord, config: &PreprocessConfig) -> Result<Record, SignalError> {
    if let Some(expected) = config.raw_rate_hz {
        let found = record.signal.sample_rate_hz;
        if (found - expected).abs() > 1e-9 * expected {
            return Err(SignalError::RateMismatch { expected, found });
        }
    }
    let scaled = scale_raw(&record.signal, config.divisor)?;
    let decimated = decimate(&scaled, config.factor, config.anti_alias)?;
    let padded = pad_head(&decimated, config.target_len)?;
    Record::new(record.id.clone(), padded, record.label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn raw(samples: Vec<f64>) -> RawSignal {
        RawSignal::single_lead(RAW_RATE_HZ, samples)
    }

    #[test]
    fn scale_divides_counts() {
        let s = scale_raw(&raw(vec![500.0, -1000.0, 0.0]), 500.0).unwrap();
        assert_eq!(s.lead(0).unwrap(), &[1.0, -2.0, 0.0]);
        let z = scale_raw(&raw(vec![0.0; 7]), 500.0).unwrap();
        assert!(z.lead(0).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn scale_by_one_is_identity_on_scaled_signal() {
        let once = scale_raw(&raw(vec![123.0, -77.0, 4096.0, 1.0]), 500.0).unwrap();
        let again = scale_raw(&RawSignal::from(&once), 1.0).unwrap();
        assert_eq!(once, again);
        let twice = scale_raw(&RawSignal::from(&once), 500.0).unwrap();
        assert_ne!(once, twice);
    }

    #[test]
    fn scale_rejects_non_finite_with_index() {
        let err = scale_raw(&raw(vec![1.0, 2.0, f64::NAN]), 500.0).unwrap_err();
        assert_eq!(err, SignalError::NonFinite { lead: 0, index: 2 });
        let err = scale_raw(&raw(vec![f64::INFINITY]), 500.0).unwrap_err();
        assert_eq!(err, SignalError::NonFinite { lead: 0, index: 0 });
        assert!(matches!(
            scale_raw(&raw(vec![1.0]), 0.0),
            Err(SignalError::InvalidDivisor(_))
        ));
    }

    #[test]
    fn signal_rejects_bad_construction() {
        assert_eq!(Signal::new(50.0, vec![]), Err(SignalError::NoLeads));
        assert_eq!(Signal::new(50.0, vec![vec![]]), Err(SignalError::NoSamples));
        assert!(matches!(
            Signal::new(50.0, vec![vec![0.0; 3], vec![0.0; 2]]),
            Err(SignalError::RaggedLeads { lead: 1, .. })
        ));
        assert!(matches!(
            Signal::new(0.0, vec![vec![0.0]]),
            Err(SignalError::InvalidRate(_))
        ));
        assert!(matches!(
            Signal::new(50.0, vec![vec![0.0, f32::NAN]]),
            Err(SignalError::NonFinite { lead: 0, index: 1 })
        ));
    }

    #[test]
    fn decimate_lengths_and_rate() {
        let s = Signal::zeros(300.0, 1, 18300).unwrap();
        let d = decimate(&s, 6, true).unwrap();
        assert_eq!(d.len(), 3050);
        assert_eq!(d.sample_rate_hz(), 50.0);
        assert_eq!(decimate(&s, 0, false), Err(SignalError::ZeroFactor));
    }

    #[test]
    fn decimate_without_filter_selects_indices() {
        let samples: Vec<f32> = (0..20).map(|v| v as f32).collect();
        let s = Signal::single_lead(300.0, samples).unwrap();
        let d = decimate(&s, 6, false).unwrap();
        assert_eq!(d.lead(0).unwrap(), &[0.0, 6.0, 12.0, 18.0]);
    }

    #[test]
    fn decimate_factor_one_is_identity() {
        let s = Signal::single_lead(300.0, vec![0.25, -1.5, 3.0]).unwrap();
        assert_eq!(decimate(&s, 1, true).unwrap(), s);
        assert_eq!(decimate(&s, 1, false).unwrap(), s);
    }

    #[test]
    fn pad_head_prefixes_zeros() {
        let samples: Vec<f32> = (1..=450).map(|v| v as f32).collect();
        let s = Signal::single_lead(50.0, samples.clone()).unwrap();
        let p = pad_head(&s, 3050).unwrap();
        let lead = p.lead(0).unwrap();
        assert_eq!(lead.len(), 3050);
        assert!(lead[..2600].iter().all(|&v| v.to_bits() == 0));
        assert_eq!(&lead[2600..], samples.as_slice());

        let full = Signal::zeros(50.0, 1, 3050).unwrap();
        assert_eq!(pad_head(&full, 3050).unwrap(), full);
        let long = Signal::zeros(50.0, 1, 3051).unwrap();
        assert_eq!(
            pad_head(&long, 3050),
            Err(SignalError::TooLong {
                len: 3051,
                target: 3050
            })
        );
    }

    #[test]
    fn preprocess_full_length_record() {
        let rec = RawRecord {
            id: "A00001".into(),
            signal: raw(vec![250.0; 18300]),
            label: Some(Label::AF),
        };
        let out = preprocess(&rec, &PreprocessConfig::default()).unwrap();
        assert_eq!(out.id, "A00001");
        assert_eq!(out.label, Some(Label::AF));
        assert_eq!(out.signal.len(), 3050);
        assert_eq!(out.signal.sample_rate_hz(), 50.0);
    }

    #[test]
    fn preprocess_zeros_and_guards() {
        let rec = RawRecord {
            id: "A00002".into(),
            signal: raw(vec![0.0; 2700]),
            label: None,
        };
        let out = preprocess(&rec, &PreprocessConfig::default()).unwrap();
        assert_eq!(out.signal.len(), 3050);
        assert!(out.signal.lead(0).unwrap().iter().all(|&v| v == 0.0));

        let too_long = RawRecord {
            id: "A00003".into(),
            signal: raw(vec![0.0; 18301]),
            label: None,
        };
        assert!(matches!(
            preprocess(&too_long, &PreprocessConfig::default()),
            Err(SignalError::TooLong { len: 3051, .. })
        ));

        let processed = RawRecord {
            id: "A00004".into(),
            signal: RawSignal::single_lead(50.0, vec![0.0; 3050]),
            label: None,
        };
        assert!(matches!(
            preprocess(&processed, &PreprocessConfig::default()),
            Err(SignalError::RateMismatch { .. })
        ));
    }

    #[test]
    fn preprocess_matches_manual_chain() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let config = PreprocessConfig::default();
        for i in 0..10 {
            let len = rng.random_range(2700..=18300);
            let samples: Vec<f64> = (0..len)
                .map(|_| f64::from(rng.random_range(-2000i32..2000)))
                .collect();
            let rec = RawRecord {
                id: format!("R{i}"),
                signal: raw(samples),
                label: Some(Label::Other),
            };
            let composed = preprocess(&rec, &config).unwrap();
            let manual = pad_head(
                &decimate(&scale_raw(&rec.signal, 500.0).unwrap(), 6, true).unwrap(),
                3050,
            )
            .unwrap();
            assert_eq!(composed.signal, manual);
            let again = preprocess(&rec, &config).unwrap();
            assert_eq!(composed, again);
        }
    }

    #[test]
    fn label_codes_are_stable() {
        for (i, label) in Label::ALL.iter().enumerate() {
            assert_eq!(label.code() as usize, i);
            assert_eq!(Label::from_code(i as u8), Some(*label));
            assert_eq!(
                Label::from_letter(&label.letter().to_string()),
                Some(*label)
            );
        }
        assert_eq!(Label::from_code(4), None);
        assert_eq!(Label::from_letter("X"), None);
    }

    proptest! {
        #[test]
        fn decimated_length_is_ceiling(len in 1usize..1000, factor in 1usize..12) {
            let s = Signal::zeros(300.0, 1, len).unwrap();
            let d = decimate(&s, factor, false).unwrap();
            prop_assert_eq!(d.len(), len.div_ceil(factor));
            let d = decimate(&s, factor, true).unwrap();
            prop_assert_eq!(d.len(), len.div_ceil(factor));
        }

        #[test]
        fn scale_is_linear(
            counts in proptest::collection::vec(-4096i32..4096, 1..64),
            a in -8.0f64..8.0,
        ) {
            let base: Vec<f64> = counts.iter().map(|&c| f64::from(c)).collect();
            let scaled_input: Vec<f64> = base.iter().map(|v| a * v).collect();
            let lhs = scale_raw(&raw(scaled_input), 500.0).unwrap();
            let rhs = scale_raw(&raw(base), 500.0).unwrap();
            for (l, r) in lhs.lead(0).unwrap().iter().zip(rhs.lead(0).unwrap()) {
                let expected = a as f32 * r;
                let tol = 4.0 * f32::EPSILON * expected.abs().max(f32::MIN_POSITIVE);
                prop_assert!((l - expected).abs() <= tol, "{} vs {}", l, expected);
            }
        }
    }
}
