//! The thirteen augmentation transforms.
//!
//! Every op is a pure function of a signal and fully concrete parameters.
//! Random draws (masks, noise) are reified as seeds so that the same inputs
//! always produce the same bytes.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fir::{self, FirError};
use crate::signal::Signal;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AugmentError {
    #[error("lead {lead} out of range for a {leads}-lead signal")]
    LeadOutOfRange { lead: usize, leads: usize },
    #[error("interval [{start}, {start}+{len}) exceeds signal length {total}")]
    IntervalOutOfRange {
        start: usize,
        len: usize,
        total: usize,
    },
    #[error("invalid {kind} parameter: {reason}")]
    InvalidParam { kind: OpKind, reason: String },
    #[error("{kind} produced a non-finite sample")]
    NonFinite { kind: OpKind },
    #[error(transparent)]
    Filter(#[from] FirError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Erase,
    Scale,
    Flip,
    Drop,
    Cutout,
    Shift,
    Sine,
    Square,
    PartialSine,
    PartialSquare,
    PartialWhiteNoise,
    FirLow,
    FirHigh,
}

impl OpKind {
    pub const ALL: [OpKind; 13] = [
        OpKind::Erase,
        OpKind::Scale,
        OpKind::Flip,
        OpKind::Drop,
        OpKind::Cutout,
        OpKind::Shift,
        OpKind::Sine,
        OpKind::Square,
        OpKind::PartialSine,
        OpKind::PartialSquare,
        OpKind::PartialWhiteNoise,
        OpKind::FirLow,
        OpKind::FirHigh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Erase => "erase",
            OpKind::Scale => "scale",
            OpKind::Flip => "flip",
            OpKind::Drop => "drop",
            OpKind::Cutout => "cutout",
            OpKind::Shift => "shift",
            OpKind::Sine => "sine",
            OpKind::Square => "square",
            OpKind::PartialSine => "partial_sine",
            OpKind::PartialSquare => "partial_square",
            OpKind::PartialWhiteNoise => "partial_white_noise",
            OpKind::FirLow => "fir_low",
            OpKind::FirHigh => "fir_high",
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Half-open sample range `[start, start + len)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub start: usize,
    pub len: usize,
}

impl Interval {
    pub fn new(start: usize, len: usize) -> Self {
        Self { start, len }
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }

    fn check(&self, total: usize) -> Result<(), AugmentError> {
        match self.start.checked_add(self.len) {
            Some(end) if end <= total => Ok(()),
            _ => Err(AugmentError::IntervalOutOfRange {
                start: self.start,
                len: self.len,
                total,
            }),
        }
    }
}

/// Periodic waveform parameters shared by the sine and square ops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub amplitude: f64,
    pub freq_hz: f64,
    pub phase_rad: f64,
}

impl Wave {
    fn check(&self, kind: OpKind) -> Result<(), AugmentError> {
        if !(self.amplitude.is_finite() && self.freq_hz.is_finite() && self.phase_rad.is_finite()) {
            return Err(invalid(kind, "wave parameters must be finite"));
        }
        if self.freq_hz < 0.0 {
            return Err(invalid(kind, "frequency must be non-negative"));
        }
        Ok(())
    }

    fn angle(&self, t: usize, rate: f64) -> f64 {
        2.0 * PI * self.freq_hz * t as f64 / rate + self.phase_rad
    }
}

/// Concrete parameters for one application of one op.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpParams {
    /// `None` leaves every lead intact.
    Erase {
        lead: Option<usize>,
    },
    Scale {
        factor: f64,
    },
    Flip {
        active: bool,
    },
    Drop {
        prob: f64,
        seed: u64,
    },
    Cutout(Interval),
    Shift {
        offset: i64,
    },
    Sine(Wave),
    Square(Wave),
    PartialSine {
        wave: Wave,
        interval: Interval,
    },
    PartialSquare {
        wave: Wave,
        interval: Interval,
    },
    PartialWhiteNoise {
        interval: Interval,
        sigma: f64,
        seed: u64,
    },
    /// Cutoffs at or above Nyquist pass the signal through unchanged.
    FirLow {
        cutoff_hz: f64,
    },
    /// A zero cutoff passes the signal through unchanged.
    FirHigh {
        cutoff_hz: f64,
    },
}

impl OpParams {
    pub fn kind(&self) -> OpKind {
        match self {
            OpParams::Erase { .. } => OpKind::Erase,
            OpParams::Scale { .. } => OpKind::Scale,
            OpParams::Flip { .. } => OpKind::Flip,
            OpParams::Drop { .. } => OpKind::Drop,
            OpParams::Cutout(_) => OpKind::Cutout,
            OpParams::Shift { .. } => OpKind::Shift,
            OpParams::Sine(_) => OpKind::Sine,
            OpParams::Square(_) => OpKind::Square,
            OpParams::PartialSine { .. } => OpKind::PartialSine,
            OpParams::PartialSquare { .. } => OpKind::PartialSquare,
            OpParams::PartialWhiteNoise { .. } => OpKind::PartialWhiteNoise,
            OpParams::FirLow { .. } => OpKind::FirLow,
            OpParams::FirHigh { .. } => OpKind::FirHigh,
        }
    }

    /// The parameters under which `kind` returns its input unchanged.
    pub fn identity(kind: OpKind, sample_rate_hz: f64) -> OpParams {
        let flat = Wave {
            amplitude: 0.0,
            freq_hz: 0.0,
            phase_rad: 0.0,
        };
        let empty = Interval::new(0, 0);
        match kind {
            OpKind::Erase => OpParams::Erase { lead: None },
            OpKind::Scale => OpParams::Scale { factor: 1.0 },
            OpKind::Flip => OpParams::Flip { active: false },
            OpKind::Drop => OpParams::Drop { prob: 0.0, seed: 0 },
            OpKind::Cutout => OpParams::Cutout(empty),
            OpKind::Shift => OpParams::Shift { offset: 0 },
            OpKind::Sine => OpParams::Sine(flat),
            OpKind::Square => OpParams::Square(flat),
            OpKind::PartialSine => OpParams::PartialSine {
                wave: flat,
                interval: empty,
            },
            OpKind::PartialSquare => OpParams::PartialSquare {
                wave: flat,
                interval: empty,
            },
            OpKind::PartialWhiteNoise => OpParams::PartialWhiteNoise {
                interval: empty,
                sigma: 0.0,
                seed: 0,
            },
            OpKind::FirLow => OpParams::FirLow {
                cutoff_hz: sample_rate_hz / 2.0,
            },
            OpKind::FirHigh => OpParams::FirHigh { cutoff_hz: 0.0 },
        }
    }

    pub fn apply(&self, signal: &Signal) -> Result<Signal, AugmentError> {
        match *self {
            OpParams::Erase { lead: None } => Ok(signal.clone()),
            OpParams::Erase { lead: Some(lead) } => erase(signal, lead),
            OpParams::Scale { factor } => scale(signal, factor),
            OpParams::Flip { active: true } => Ok(flip(signal)),
            OpParams::Flip { active: false } => Ok(signal.clone()),
            OpParams::Drop { prob, seed } => drop_samples(signal, prob, seed),
            OpParams::Cutout(interval) => cutout(signal, interval),
            OpParams::Shift { offset } => Ok(shift(signal, offset)),
            OpParams::Sine(wave) => add_sine(signal, wave),
            OpParams::Square(wave) => add_square(signal, wave),
            OpParams::PartialSine { wave, interval } => partial_sine(signal, wave, interval),
            OpParams::PartialSquare { wave, interval } => partial_square(signal, wave, interval),
            OpParams::PartialWhiteNoise {
                interval,
                sigma,
                seed,
            } => partial_white_noise(signal, interval, sigma, seed),
            OpParams::FirLow { cutoff_hz } => fir_low(signal, cutoff_hz),
            OpParams::FirHigh { cutoff_hz } => fir_high(signal, cutoff_hz),
        }
    }
}

fn invalid(kind: OpKind, reason: &str) -> AugmentError {
    AugmentError::InvalidParam {
        kind,
        reason: reason.to_string(),
    }
}

fn finish(kind: OpKind, rate: f64, leads: Vec<Vec<f32>>) -> Result<Signal, AugmentError> {
    if leads.iter().flatten().any(|v| !v.is_finite()) {
        return Err(AugmentError::NonFinite { kind });
    }
    Ok(Signal::from_parts(rate, leads))
}

fn map_samples(signal: &Signal, f: impl Fn(f32) -> f32) -> Vec<Vec<f32>> {
    signal
        .leads()
        .iter()
        .map(|lead| lead.iter().map(|&v| f(v)).collect())
        .collect()
}

/// Zeroes one lead.
pub fn erase(signal: &Signal, lead: usize) -> Result<Signal, AugmentError> {
    let leads = signal.num_leads();
    if lead >= leads {
        return Err(AugmentError::LeadOutOfRange { lead, leads });
    }
    let mut out = signal.leads().to_vec();
    out[lead].iter_mut().for_each(|v| *v = 0.0);
    Ok(Signal::from_parts(signal.sample_rate_hz(), out))
}

pub fn scale(signal: &Signal, factor: f64) -> Result<Signal, AugmentError> {
    if !factor.is_finite() {
        return Err(invalid(OpKind::Scale, "factor must be finite"));
    }
    if factor == 1.0 {
        return Ok(signal.clone());
    }
    let leads = map_samples(signal, |v| (f64::from(v) * factor) as f32);
    finish(OpKind::Scale, signal.sample_rate_hz(), leads)
}

/// Negates every sample.
pub fn flip(signal: &Signal) -> Signal {
    Signal::from_parts(signal.sample_rate_hz(), map_samples(signal, |v| -v))
}

/// Zeroes each sample independently with probability `prob`, using a mask
/// generated from `seed`.
pub fn drop_samples(signal: &Signal, prob: f64, seed: u64) -> Result<Signal, AugmentError> {
    if !(0.0..=1.0).contains(&prob) {
        return Err(invalid(OpKind::Drop, "probability must lie in [0, 1]"));
    }
    if prob == 0.0 {
        return Ok(signal.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leads = signal
        .leads()
        .iter()
        .map(|lead| {
            lead.iter()
                .map(|&v| if rng.random::<f64>() < prob { 0.0 } else { v })
                .collect()
        })
        .collect();
    Ok(Signal::from_parts(signal.sample_rate_hz(), leads))
}

/// Zeroes `interval` on every lead.
pub fn cutout(signal: &Signal, interval: Interval) -> Result<Signal, AugmentError> {
    interval.check(signal.len())?;
    if interval.len == 0 {
        return Ok(signal.clone());
    }
    let mut out = signal.leads().to_vec();
    for lead in &mut out {
        lead[interval.start..interval.end()].fill(0.0);
    }
    Ok(Signal::from_parts(signal.sample_rate_hz(), out))
}

/// Moves content by `offset` samples (positive = later), zero-filling the
/// vacated region.
pub fn shift(signal: &Signal, offset: i64) -> Signal {
    if offset == 0 {
        return signal.clone();
    }
    let len = signal.len();
    let magnitude = usize::try_from(offset.unsigned_abs())
        .unwrap_or(usize::MAX)
        .min(len);
    let leads = signal
        .leads()
        .iter()
        .map(|lead| {
            let mut out = vec![0.0f32; len];
            if offset > 0 {
                out[magnitude..].copy_from_slice(&lead[..len - magnitude]);
            } else {
                out[..len - magnitude].copy_from_slice(&lead[magnitude..]);
            }
            out
        })
        .collect();
    Signal::from_parts(signal.sample_rate_hz(), leads)
}

fn add_wave(
    signal: &Signal,
    kind: OpKind,
    interval: Interval,
    value: impl Fn(usize) -> f64,
) -> Result<Signal, AugmentError> {
    let mut out = signal.leads().to_vec();
    for lead in &mut out {
        for (t, v) in lead
            .iter_mut()
            .enumerate()
            .take(interval.end())
            .skip(interval.start)
        {
            *v = (f64::from(*v) + value(t)) as f32;
        }
    }
    finish(kind, signal.sample_rate_hz(), out)
}

fn sine_wave(
    signal: &Signal,
    kind: OpKind,
    wave: Wave,
    interval: Interval,
) -> Result<Signal, AugmentError> {
    wave.check(kind)?;
    interval.check(signal.len())?;
    if wave.amplitude == 0.0 || interval.len == 0 {
        return Ok(signal.clone());
    }
    let rate = signal.sample_rate_hz();
    add_wave(signal, kind, interval, |t| {
        wave.amplitude * wave.angle(t, rate).sin()
    })
}

fn square_wave(
    signal: &Signal,
    kind: OpKind,
    wave: Wave,
    interval: Interval,
) -> Result<Signal, AugmentError> {
    wave.check(kind)?;
    interval.check(signal.len())?;
    if wave.amplitude == 0.0 || interval.len == 0 {
        return Ok(signal.clone());
    }
    let rate = signal.sample_rate_hz();
    add_wave(signal, kind, interval, |t| {
        if wave.angle(t, rate).sin() >= 0.0 {
            wave.amplitude
        } else {
            -wave.amplitude
        }
    })
}

/// Adds `amplitude · sin(2π f t / rate + phase)` to the whole record.
pub fn add_sine(signal: &Signal, wave: Wave) -> Result<Signal, AugmentError> {
    sine_wave(signal, OpKind::Sine, wave, Interval::new(0, signal.len()))
}

pub fn partial_sine(
    signal: &Signal,
    wave: Wave,
    interval: Interval,
) -> Result<Signal, AugmentError> {
    sine_wave(signal, OpKind::PartialSine, wave, interval)
}

/// Adds a 50% duty square wave of the given amplitude (sign of the matching
/// sine, with sgn(0) = +1).
pub fn add_square(signal: &Signal, wave: Wave) -> Result<Signal, AugmentError> {
    square_wave(signal, OpKind::Square, wave, Interval::new(0, signal.len()))
}

pub fn partial_square(
    signal: &Signal,
    wave: Wave,
    interval: Interval,
) -> Result<Signal, AugmentError> {
    square_wave(signal, OpKind::PartialSquare, wave, interval)
}

/// Adds Gaussian(0, sigma²) noise drawn from `seed` on `interval`.
pub fn partial_white_noise(
    signal: &Signal,
    interval: Interval,
    sigma: f64,
    seed: u64,
) -> Result<Signal, AugmentError> {
    let kind = OpKind::PartialWhiteNoise;
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(invalid(kind, "sigma must be finite and non-negative"));
    }
    interval.check(signal.len())?;
    if sigma == 0.0 || interval.len == 0 {
        return Ok(signal.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| invalid(kind, &e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = signal.leads().to_vec();
    for lead in &mut out {
        for v in &mut lead[interval.start..interval.end()] {
            *v = (f64::from(*v) + normal.sample(&mut rng)) as f32;
        }
    }
    finish(kind, signal.sample_rate_hz(), out)
}

pub fn fir_low(signal: &Signal, cutoff_hz: f64) -> Result<Signal, AugmentError> {
    let nyquist = signal.sample_rate_hz() / 2.0;
    if !(cutoff_hz.is_finite() && cutoff_hz > 0.0) {
        return Err(invalid(OpKind::FirLow, "cutoff must be positive"));
    }
    if cutoff_hz >= nyquist {
        return Ok(signal.clone());
    }
    let filter = fir::design_lowpass(cutoff_hz, signal.sample_rate_hz(), fir::DEFAULT_TAPS)?;
    Ok(fir::convolve_same(signal, &filter)?)
}

pub fn fir_high(signal: &Signal, cutoff_hz: f64) -> Result<Signal, AugmentError> {
    if cutoff_hz == 0.0 {
        return Ok(signal.clone());
    }
    let filter = fir::design_highpass(cutoff_hz, signal.sample_rate_hz(), fir::DEFAULT_TAPS)?;
    Ok(fir::convolve_same(signal, &filter)?)
}
