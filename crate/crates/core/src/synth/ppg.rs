//! Pulse-train PPG generator.
//!
//! Each beat `k` starts at `b_k` with period `P_k`, where
//! `P_k = P * (1 + jitter * z_k)`, `z_k ~ N(0, 1)`, clamped to `[0.5P, 1.5P]`.
//! The beat waveform is an asymmetric Gaussian systolic peak (amplitude 1,
//! rise width `0.06 P_k`, fall width `0.14 P_k`) at `b_k + 0.2 P_k` plus a
//! dicrotic bump (amplitude 0.25, width `0.05 P_k`) at `b_k + 0.55 P_k`. A
//! 0.2 Hz respiratory baseline of amplitude 0.15 and Gaussian noise are added.
//!
//! Drowsy and wakeful recordings share the heart-rate range; wakeful ones get
//! larger beat-to-beat jitter.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::dsp::{Label, PpgSeries, NATIVE_RATE_HZ};
use crate::seed::{derive_seed, rng};
use crate::{Error, Result};

const SYSTOLIC_AT: f64 = 0.2;
const RISE: f64 = 0.06;
const FALL: f64 = 0.14;
const DICROTIC_AT: f64 = 0.55;
const DICROTIC_WIDTH: f64 = 0.05;
const DICROTIC_AMP: f64 = 0.25;
const RESP_HZ: f64 = 0.2;
const RESP_AMP: f64 = 0.15;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticPpgSpec {
    pub class: Label,
    pub heart_rate_hz: f64,
    pub hr_jitter: f64,
    pub noise_std: f64,
    pub duration_s: f64,
    pub seed: u64,
}

impl SyntheticPpgSpec {
    /// Beat-to-beat jitter used for each class by the dataset builders.
    pub fn class_jitter(class: Label) -> f64 {
        match class {
            Label::Drowsy => 0.02,
            Label::Wakeful => 0.18,
        }
    }

    pub fn for_class(class: Label, heart_rate_hz: f64, duration_s: f64, seed: u64) -> Self {
        Self {
            class,
            heart_rate_hz,
            hr_jitter: Self::class_jitter(class),
            noise_std: 0.02,
            duration_s,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.6..=3.0).contains(&self.heart_rate_hz) {
            return Err(Error::InvalidArgument(format!(
                "heart rate must be in [0.6, 3.0] Hz, got {}",
                self.heart_rate_hz
            )));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "duration must be positive, got {}",
                self.duration_s
            )));
        }
        if !(self.hr_jitter >= 0.0 && self.hr_jitter < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "jitter must be in [0, 1), got {}",
                self.hr_jitter
            )));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise std must be non-negative, got {}",
                self.noise_std
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticPpg {
    pub series: PpgSeries,
    pub label: Label,
    /// Systolic peak times in seconds.
    pub peak_times_s: Vec<f64>,
}

fn beat(t: f64, start: f64, period: f64) -> f64 {
    let peak = start + SYSTOLIC_AT * period;
    let width = if t < peak { RISE } else { FALL } * period;
    let d = (t - peak) / width;
    let systolic = (-0.5 * d * d).exp();
    let dd = (t - start - DICROTIC_AT * period) / (DICROTIC_WIDTH * period);
    systolic + DICROTIC_AMP * (-0.5 * dd * dd).exp()
}

/// Generates a 1 kHz recording starting at t = 0 ms.
pub fn gen_synthetic_ppg(spec: &SyntheticPpgSpec) -> Result<SyntheticPpg> {
    spec.validate()?;
    let n = (spec.duration_s * NATIVE_RATE_HZ).round().max(1.0) as usize;
    let end = n as f64 / NATIVE_RATE_HZ;
    let mean_period = 1.0 / spec.heart_rate_hz;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");

    let mut beat_rng = rng(derive_seed(spec.seed, "synth.ppg.beats"));
    let mut beats = Vec::new();
    // start one beat early so the recording opens mid-pulse
    let mut start = -mean_period * beat_rng.gen::<f64>();
    while start < end {
        let z: f64 = normal.sample(&mut beat_rng);
        let period =
            (mean_period * (1.0 + spec.hr_jitter * z)).clamp(0.5 * mean_period, 1.5 * mean_period);
        beats.push((start, period));
        start += period;
    }

    let phase = 2.0 * std::f64::consts::PI * beat_rng.gen::<f64>();
    let mut noise_rng = rng(derive_seed(spec.seed, "synth.ppg.noise"));
    let mut samples = vec![0.0; n];
    let mut first = 0;
    for (i, s) in samples.iter_mut().enumerate() {
        let t = i as f64 / NATIVE_RATE_HZ;
        while first + 1 < beats.len() && beats[first].0 + 2.0 * beats[first].1 < t {
            first += 1;
        }
        let mut v = 0.0;
        for &(b, p) in beats[first..].iter().take_while(|(b, _)| *b <= t + 0.5) {
            v += beat(t, b, p);
        }
        v += RESP_AMP * (2.0 * std::f64::consts::PI * RESP_HZ * t + phase).sin();
        if spec.noise_std > 0.0 {
            v += spec.noise_std * normal.sample(&mut noise_rng);
        }
        *s = v;
    }
    let peak_times_s = beats
        .iter()
        .map(|&(b, p)| b + SYSTOLIC_AT * p)
        .filter(|&t| (0.0..end).contains(&t))
        .collect();
    Ok(SyntheticPpg {
        series: PpgSeries::new(NATIVE_RATE_HZ, 0, samples)?,
        label: spec.class,
        peak_times_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::detect_extrema;

    fn spec(class: Label) -> SyntheticPpgSpec {
        SyntheticPpgSpec {
            class,
            heart_rate_hz: 1.0,
            hr_jitter: SyntheticPpgSpec::class_jitter(class),
            noise_std: 0.0,
            duration_s: 10.0,
            seed: 3,
        }
    }

    #[test]
    fn systolic_maxima_match_heart_rate() {
        for class in [Label::Drowsy, Label::Wakeful] {
            let ppg = gen_synthetic_ppg(&spec(class)).unwrap();
            assert_eq!(ppg.series.len(), 10_000);
            let ext = detect_extrema(&ppg.series);
            let tall = ext
                .maxima_idx
                .iter()
                .filter(|&&i| ppg.series.samples()[i] > 0.6)
                .count();
            assert!((9..=11).contains(&tall), "{class:?}: {tall}");
            assert_eq!(tall, ppg.peak_times_s.len());
        }
    }

    #[test]
    fn same_seed_same_series() {
        let mut s = spec(Label::Wakeful);
        s.noise_std = 0.05;
        let a = gen_synthetic_ppg(&s).unwrap();
        let b = gen_synthetic_ppg(&s).unwrap();
        assert_eq!(a.series, b.series);
        s.seed = 4;
        assert_ne!(a.series, gen_synthetic_ppg(&s).unwrap().series);
    }

    #[test]
    fn wakeful_intervals_vary_more() {
        let interval_sd = |class| {
            let mut s = spec(class);
            s.duration_s = 120.0;
            let p = gen_synthetic_ppg(&s).unwrap().peak_times_s;
            let d: Vec<f64> = p.windows(2).map(|w| w[1] - w[0]).collect();
            let m = d.iter().sum::<f64>() / d.len() as f64;
            (d.iter().map(|x| (x - m).powi(2)).sum::<f64>() / d.len() as f64).sqrt()
        };
        assert!(interval_sd(Label::Wakeful) > 4.0 * interval_sd(Label::Drowsy));
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = spec(Label::Drowsy);
        s.heart_rate_hz = 0.5;
        assert!(gen_synthetic_ppg(&s).is_err());
        s.heart_rate_hz = 1.0;
        s.duration_s = 0.0;
        assert!(gen_synthetic_ppg(&s).is_err());
    }
}
