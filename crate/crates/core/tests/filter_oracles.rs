//! Frequency-domain checks of the filter designs and of anti-aliased
//! decimation, against a direct transfer-function evaluation and a DFT.

use std::f64::consts::PI;

use ecg_augment::fir::{convolve_same, design_highpass, design_lowpass, FirFilter};
use ecg_augment::signal::{anti_alias_filter, decimate};
use ecg_augment::Signal;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// |H(f)| in dB, H(f) = Σ c_k e^{−j2πfk/rate}.
fn response_db(filter: &FirFilter, freq_hz: f64) -> f64 {
    let rate = filter.design_rate_hz();
    let h: Complex64 = filter
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, &c)| Complex64::from_polar(c, -2.0 * PI * freq_hz * k as f64 / rate))
        .sum();
    20.0 * h.norm().log10()
}

fn tone(rate: f64, len: usize, components: &[(f64, f64)]) -> Signal {
    let samples = (0..len)
        .map(|t| {
            components
                .iter()
                .map(|&(a, f)| a * (2.0 * PI * f * t as f64 / rate).sin())
                .sum::<f64>() as f32
        })
        .collect();
    Signal::single_lead(rate, samples).unwrap()
}

/// Amplitude of each DFT bin of `x`, normalized so a full-scale sinusoid on a
/// bin center reads as its amplitude.
fn spectrum(x: &[f32]) -> Vec<f64> {
    let n = x.len();
    let mut buf: Vec<Complex64> = x
        .iter()
        .map(|&v| Complex64::new(f64::from(v), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.iter()
        .take(n / 2 + 1)
        .map(|c| 2.0 * c.norm() / n as f64)
        .collect()
}

fn db(ratio: f64) -> f64 {
    20.0 * ratio.log10()
}

#[test]
fn lowpass_5hz_response() {
    let f = design_lowpass(5.0, 50.0, 31).unwrap();
    assert!(response_db(&f, 0.0).abs() < 1e-6);
    assert!(response_db(&f, 1.0) >= -1.0);
    assert!(response_db(&f, 15.0) <= -20.0);
}

#[test]
fn highpass_5hz_response() {
    let f = design_highpass(5.0, 50.0, 31).unwrap();
    assert!(response_db(&f, 1.0) <= -20.0);
    assert!(response_db(&f, 10.0) >= -3.0);
}

#[test]
fn lowpass_separates_tone_mixture() {
    // 2 Hz + 20 Hz, both on bin centers of a 1000-sample window at 50 Hz.
    let rate = 50.0;
    let x = tone(rate, 1000, &[(1.0, 2.0), (1.0, 20.0)]);
    let f = design_lowpass(5.0, rate, 31).unwrap();
    let y = convolve_same(&x, &f).unwrap();
    let (sx, sy) = (spectrum(x.lead(0).unwrap()), spectrum(y.lead(0).unwrap()));
    let bin = |hz: f64| (hz * 1000.0 / rate) as usize;
    assert!(db(sy[bin(2.0)] / sx[bin(2.0)]).abs() <= 1.0);
    assert!(db(sy[bin(20.0)] / sx[bin(20.0)]) <= -20.0);
}

#[test]
fn anti_alias_keeps_20hz_and_rejects_40hz() {
    let rate = 300.0;
    let len = 3000;
    // 20 Hz stays; output is 500 samples at 50 Hz.
    let x = tone(rate, len, &[(1.0, 20.0)]);
    let y = decimate(&x, 6, true).unwrap();
    assert_eq!(y.len(), 500);
    let interior = &y.lead(0).unwrap()[20..480];
    let s = spectrum(interior);
    let peak = s
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let peak_hz = peak as f64 * 50.0 / interior.len() as f64;
    assert!((peak_hz - 20.0).abs() < 0.2, "peak at {peak_hz} Hz");
    assert!(db(s[peak]).abs() <= 1.0, "20 Hz gain {} dB", db(s[peak]));

    // 40 Hz would alias to 10 Hz; it must lose at least 20 dB of energy.
    let x = tone(rate, len, &[(1.0, 40.0)]);
    let y = decimate(&x, 6, true).unwrap();
    let energy = |v: &[f32]| v.iter().map(|&s| f64::from(s).powi(2)).sum::<f64>() / v.len() as f64;
    let e_in = energy(&x.lead(0).unwrap()[120..2880]);
    let e_out = energy(&y.lead(0).unwrap()[20..480]);
    assert!(10.0 * (e_out / e_in).log10() <= -20.0);

    let f = anti_alias_filter(rate, 6).unwrap();
    assert!(response_db(&f, 20.0) >= -1.0);
    assert!(response_db(&f, 40.0) <= -20.0);
}

#[test]
fn decimate_without_filter_aliases() {
    let x = tone(300.0, 3000, &[(1.0, 40.0)]);
    let y = decimate(&x, 6, false).unwrap();
    let e: f64 = y
        .lead(0)
        .unwrap()
        .iter()
        .map(|&v| f64::from(v).powi(2))
        .sum::<f64>()
        / 500.0;
    assert!(e > 0.4);
}
