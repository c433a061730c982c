//! Transfer-function measurement of the filter-bank taps by FFT.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use vigil_core::dsp::{build_filter_bank_with_order, design_fir, FilterSpec};

pub const FFT_LEN: usize = 65536;

/// Worst figures of one channel.
#[derive(Debug, Clone)]
pub struct ChannelResponse {
    pub channel: usize,
    pub spec: FilterSpec,
    /// Smallest attenuation over the stop bands, in dB (positive).
    pub stopband_db: f64,
    /// Largest `|20 log10 |H||` over the pass band, in dB.
    pub passband_dev_db: f64,
}

/// `|H(f)|` on the FFT grid up to Nyquist.
fn magnitude(taps: &[f64]) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = taps.iter().map(|&t| Complex::new(t, 0.0)).collect();
    buf.resize(FFT_LEN, Complex::new(0.0, 0.0));
    FftPlanner::new()
        .plan_fft_forward(FFT_LEN)
        .process(&mut buf);
    buf[..=FFT_LEN / 2].iter().map(|c| c.norm()).collect()
}

/// Measures every channel. Band edges sit half a Hamming transition width
/// (`3.3 fs / order`) away from each cutoff.
pub fn measure(fs: f64, order: usize) -> Vec<ChannelResponse> {
    let bank = build_filter_bank_with_order(fs, order).unwrap();
    let half = 0.5 * 3.3 * fs / order as f64;
    bank.channels
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let mag = magnitude(&design_fir(spec, fs).unwrap());
            let (lo, hi) = spec.pass_band();
            let hi = hi.unwrap_or(fs / 2.0 + half);
            let mut stop: f64 = f64::INFINITY;
            let mut dev: f64 = 0.0;
            for (k, &m) in mag.iter().enumerate() {
                let f = k as f64 * fs / FFT_LEN as f64;
                let db = 20.0 * m.max(1e-300).log10();
                if f <= lo - half || f >= hi + half {
                    stop = stop.min(-db);
                } else if f >= lo + half && f <= hi - half {
                    dev = dev.max(db.abs());
                }
            }
            ChannelResponse {
                channel: i + 1,
                spec: *spec,
                stopband_db: stop,
                passband_dev_db: dev,
            }
        })
        .collect()
}
