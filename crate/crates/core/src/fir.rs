//! Hamming-windowed sinc FIR design and zero-padded, delay-compensated
//! application.

use std::f64::consts::PI;

use thiserror::Error;

use crate::signal::Signal;

pub const DEFAULT_TAPS: usize = 31;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FirError {
    #[error("cutoff {cutoff_hz} Hz outside (0, {nyquist_hz}) Hz")]
    CutoffOutOfRange { cutoff_hz: f64, nyquist_hz: f64 },
    #[error("design rate must be positive and finite, got {0}")]
    InvalidRate(f64),
    #[error("tap count must be odd and at least 3, got {0}")]
    InvalidTaps(usize),
    #[error("filter designed for {filter_hz} Hz applied to a {signal_hz} Hz signal")]
    RateMismatch { filter_hz: f64, signal_hz: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Lowpass,
    Highpass,
}

/// Linear-phase FIR filter with an odd number of symmetric taps.
#[derive(Debug, Clone, PartialEq)]
pub struct FirFilter {
    coeffs: Vec<f64>,
    kind: FilterKind,
    cutoff_hz: f64,
    design_rate_hz: f64,
}

impl FirFilter {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    pub fn cutoff_hz(&self) -> f64 {
        self.cutoff_hz
    }

    pub fn design_rate_hz(&self) -> f64 {
        self.design_rate_hz
    }

    pub fn taps(&self) -> usize {
        self.coeffs.len()
    }

    /// Group delay in samples, (taps − 1) / 2.
    pub fn delay(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }
}

fn check_design(cutoff_hz: f64, rate_hz: f64, taps: usize) -> Result<(), FirError> {
    if !(rate_hz.is_finite() && rate_hz > 0.0) {
        return Err(FirError::InvalidRate(rate_hz));
    }
    let nyquist_hz = rate_hz / 2.0;
    if !(cutoff_hz > 0.0 && cutoff_hz < nyquist_hz) {
        return Err(FirError::CutoffOutOfRange {
            cutoff_hz,
            nyquist_hz,
        });
    }
    if taps < 3 || taps.is_multiple_of(2) {
        return Err(FirError::InvalidTaps(taps));
    }
    Ok(())
}

fn hamming(n: usize, taps: usize) -> f64 {
    0.54 - 0.46 * (2.0 * PI * n as f64 / (taps - 1) as f64).cos()
}

/// Windowed-sinc lowpass normalized to unit DC gain.
pub fn design_lowpass(cutoff_hz: f64, rate_hz: f64, taps: usize) -> Result<FirFilter, FirError> {
    check_design(cutoff_hz, rate_hz, taps)?;
    let fc = cutoff_hz / rate_hz;
    let center = (taps - 1) / 2;
    let mut coeffs: Vec<f64> = (0..taps)
        .map(|n| {
            let x = n as f64 - center as f64;
            let ideal = if n == center {
                2.0 * fc
            } else {
                (2.0 * PI * fc * x).sin() / (PI * x)
            };
            ideal * hamming(n, taps)
        })
        .collect();
    let gain: f64 = coeffs.iter().sum();
    for c in &mut coeffs {
        *c /= gain;
    }
    // Normalization can leave last-bit asymmetry; mirror the left half.
    for i in 0..center {
        coeffs[taps - 1 - i] = coeffs[i];
    }
    Ok(FirFilter {
        coeffs,
        kind: FilterKind::Lowpass,
        cutoff_hz,
        design_rate_hz: rate_hz,
    })
}

/// Spectral inversion of the matching lowpass.
pub fn design_highpass(cutoff_hz: f64, rate_hz: f64, taps: usize) -> Result<FirFilter, FirError> {
    let lowpass = design_lowpass(cutoff_hz, rate_hz, taps)?;
    let center = lowpass.delay();
    let mut coeffs: Vec<f64> = lowpass.coeffs.iter().map(|c| -c).collect();
    coeffs[center] += 1.0;
    Ok(FirFilter {
        coeffs,
        kind: FilterKind::Highpass,
        cutoff_hz,
        design_rate_hz: rate_hz,
    })
}

/// Same-length convolution with zero-padded edges, aligned to the filter
/// center so features are not delayed.
pub fn convolve_same(signal: &Signal, filter: &FirFilter) -> Result<Signal, FirError> {
    let rate = signal.sample_rate_hz();
    if (rate - filter.design_rate_hz).abs() > 1e-9 * rate {
        return Err(FirError::RateMismatch {
            filter_hz: filter.design_rate_hz,
            signal_hz: rate,
        });
    }
    let leads = signal
        .leads()
        .iter()
        .map(|lead| convolve_lead(lead, &filter.coeffs))
        .collect();
    Ok(Signal::from_parts(rate, leads))
}

fn convolve_lead(input: &[f32], coeffs: &[f64]) -> Vec<f32> {
    let len = input.len() as isize;
    let delay = ((coeffs.len() - 1) / 2) as isize;
    (0..len)
        .map(|n| {
            // output[n] = sum_k c[k] * x[n + delay - k], zero outside [0, len)
            let k_min = (n + delay - len + 1).max(0) as usize;
            let k_max = (n + delay).min(coeffs.len() as isize - 1) as usize;
            let mut acc = 0.0f64;
            for (k, &c) in coeffs.iter().enumerate().take(k_max + 1).skip(k_min) {
                let idx = (n + delay - k as isize) as usize;
                acc += c * f64::from(input[idx]);
            }
            acc as f32
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_designs() {
        assert!(matches!(
            design_lowpass(25.0, 50.0, 31),
            Err(FirError::CutoffOutOfRange { .. })
        ));
        assert!(matches!(
            design_highpass(0.0, 50.0, 31),
            Err(FirError::CutoffOutOfRange { .. })
        ));
        assert_eq!(
            design_lowpass(5.0, 50.0, 30),
            Err(FirError::InvalidTaps(30))
        );
        assert_eq!(design_lowpass(5.0, 50.0, 1), Err(FirError::InvalidTaps(1)));
        assert!(matches!(
            design_lowpass(5.0, -1.0, 31),
            Err(FirError::InvalidRate(_))
        ));
    }

    #[test]
    fn lowpass_normalized_and_symmetric() {
        for &(cutoff, rate, taps) in &[(5.0, 50.0, 31), (20.0, 300.0, 97), (0.5, 50.0, 3)] {
            let f = design_lowpass(cutoff, rate, taps).unwrap();
            let sum: f64 = f.coeffs().iter().sum();
            assert!((sum - 1.0).abs() < 1e-6);
            for i in 0..taps {
                assert_eq!(f.coeffs()[i], f.coeffs()[taps - 1 - i]);
            }
        }
    }

    #[test]
    fn highpass_rejects_dc() {
        let f = design_highpass(5.0, 50.0, 31).unwrap();
        let sum: f64 = f.coeffs().iter().sum();
        assert!(sum.abs() < 1e-6);
        let constant = Signal::single_lead(50.0, vec![0.75; 200]).unwrap();
        let out = convolve_same(&constant, &f).unwrap();
        let lead = out.lead(0).unwrap();
        for &v in &lead[f.delay()..200 - f.delay()] {
            assert!(v.abs() < 1e-5, "{v}");
        }
    }

    #[test]
    fn impulse_response_is_centered() {
        let f = design_lowpass(5.0, 50.0, 31).unwrap();
        let mut samples = vec![0.0f32; 101];
        samples[50] = 1.0;
        let out = convolve_same(&Signal::single_lead(50.0, samples).unwrap(), &f).unwrap();
        let lead = out.lead(0).unwrap();
        for (i, &v) in lead.iter().enumerate() {
            let k = i as isize - 50 + 15;
            let expected = if (0..31).contains(&k) {
                f.coeffs()[k as usize] as f32
            } else {
                0.0
            };
            assert_eq!(v, expected, "index {i}");
        }
    }

    #[test]
    fn zeros_stay_zero_and_rate_checked() {
        let f = design_lowpass(5.0, 50.0, 31).unwrap();
        let z = Signal::zeros(50.0, 2, 64).unwrap();
        assert_eq!(convolve_same(&z, &f).unwrap(), z);
        let other = Signal::zeros(300.0, 1, 64).unwrap();
        assert!(matches!(
            convolve_same(&other, &f),
            Err(FirError::RateMismatch { .. })
        ));
    }

    #[test]
    fn short_signals_shorter_than_filter() {
        let f = design_lowpass(5.0, 50.0, 31).unwrap();
        let s = Signal::single_lead(50.0, vec![1.0, 2.0, 3.0]).unwrap();
        let out = convolve_same(&s, &f).unwrap();
        assert_eq!(out.len(), 3);
        let c = f.coeffs();
        let expected = c[15] * 1.0 + c[14] * 2.0 + c[13] * 3.0;
        assert!((f64::from(out.lead(0).unwrap()[0]) - expected).abs() < 1e-6);
    }

    #[test]
    fn design_is_deterministic() {
        let a = design_highpass(3.3, 50.0, 31).unwrap();
        let b = design_highpass(3.3, 50.0, 31).unwrap();
        let bits = |f: &FirFilter| f.coeffs().iter().map(|c| c.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }
}
