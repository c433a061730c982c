use super::fir::{design_fir, filter_centered};
use super::{FilterKind, FilterSpec, PpgSeries};
use crate::{Error, Result};

/// Fixed high-pass edge shared by the low-pass sweep.
const SWEEP_A_HIGH_PASS_HZ: f64 = 0.5;
/// Low-pass edges of the first sweep, in column order. Zero means "no
/// low-pass stage".
const SWEEP_A_LOW_PASS_HZ: [f64; 11] = [0.0, 1.4, 2.9, 2.5, 3.8, 3.9, 4.0, 4.5, 5.0, 5.3, 6.9];
/// Fixed low-pass edge shared by the high-pass sweep.
const SWEEP_B_LOW_PASS_HZ: f64 = 7.0;
const SWEEP_B_HIGH_PASS_HZ: [f64; 11] = [0.5, 1.2, 2.6, 2.7, 3.3, 3.5, 4.0, 4.4, 5.0, 5.7, 6.4];

pub const BANK_CHANNELS: usize = 22;

/// The 22 hyper-filter channels: the low-pass sweep then the high-pass sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBankSpec {
    pub channels: Vec<FilterSpec>,
}

impl FilterBankSpec {
    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// Largest edge transient over all channels.
    pub fn transient_len(&self) -> usize {
        self.channels
            .iter()
            .map(FilterSpec::transient_len)
            .max()
            .unwrap_or(0)
    }

    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        if self.channels.len() != BANK_CHANNELS {
            return Err(Error::InvalidSpec(format!(
                "filter bank needs {BANK_CHANNELS} channels, got {}",
                self.channels.len()
            )));
        }
        self.channels
            .iter()
            .try_for_each(|c| c.validate(sample_rate_hz))
    }
}

pub fn build_filter_bank(sample_rate_hz: f64) -> Result<FilterBankSpec> {
    build_filter_bank_with_order(sample_rate_hz, super::DEFAULT_FIR_ORDER)
}

pub fn build_filter_bank_with_order(sample_rate_hz: f64, order: usize) -> Result<FilterBankSpec> {
    if !(sample_rate_hz >= 15.0) {
        return Err(Error::InvalidSpec(format!(
            "filter bank needs a sample rate of at least 15 Hz, got {sample_rate_hz}"
        )));
    }
    let sweep_a = SWEEP_A_LOW_PASS_HZ.iter().map(|&lp| {
        if lp == 0.0 {
            FilterSpec::high_pass(SWEEP_A_HIGH_PASS_HZ, order)
        } else {
            FilterSpec::band_pass(SWEEP_A_HIGH_PASS_HZ, lp, order)
        }
    });
    let sweep_b = SWEEP_B_HIGH_PASS_HZ
        .iter()
        .map(|&hp| FilterSpec::band_pass(hp, SWEEP_B_LOW_PASS_HZ, order));
    let bank = FilterBankSpec {
        channels: sweep_a.chain(sweep_b).collect(),
    };
    bank.validate(sample_rate_hz)?;
    Ok(bank)
}

/// Filter-bank output: one row per channel, all rows time-aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperMatrix {
    pub sample_rate_hz: f64,
    pub start_time_ms: i64,
    pub rows: Vec<Vec<f64>>,
    /// Samples at each edge disturbed by zero padding.
    pub transient: usize,
}

impl HyperMatrix {
    pub fn n_channels(&self) -> usize {
        self.rows.len()
    }

    pub fn len(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops `samples` from both ends, shifting the start time.
    pub fn trim(&self, samples: usize) -> Result<HyperMatrix> {
        if 2 * samples >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "cannot trim {samples} samples from each end of a {}-sample matrix",
                self.len()
            )));
        }
        let end = self.len() - samples;
        Ok(HyperMatrix {
            sample_rate_hz: self.sample_rate_hz,
            start_time_ms: self.start_time_ms + self.offset_ms(samples),
            rows: self.rows.iter().map(|r| r[samples..end].to_vec()).collect(),
            transient: 0,
        })
    }

    /// Milliseconds spanned by `samples` at this rate, rounded.
    pub fn offset_ms(&self, samples: usize) -> i64 {
        (samples as f64 * 1000.0 / self.sample_rate_hz).round() as i64
    }
}

/// Runs every channel over `series`. Band-pass channels run their high-pass
/// then low-pass stage, each with group-delay removal.
pub fn apply_filter_bank(series: &PpgSeries, bank: &FilterBankSpec) -> Result<HyperMatrix> {
    let fs = series.sample_rate_hz();
    bank.validate(fs)?;
    let rows = bank
        .channels
        .iter()
        .map(|channel| {
            channel
                .stages()
                .iter()
                .try_fold(series.samples().to_vec(), |x, stage| {
                    Ok(filter_centered(&x, &design_fir(stage, fs)?))
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HyperMatrix {
        sample_rate_hz: fs,
        start_time_ms: series.start_time_ms(),
        rows,
        transient: bank.transient_len(),
    })
}

impl FilterSpec {
    /// Pass band `[low, high]` in Hz; `high` is `None` for a high-pass.
    pub fn pass_band(&self) -> (f64, Option<f64>) {
        match self.kind {
            FilterKind::LowPass { cutoff_hz } => (0.0, Some(cutoff_hz)),
            FilterKind::HighPass { cutoff_hz } => (cutoff_hz, None),
            FilterKind::BandPass { low_hz, high_hz } => (low_hz, Some(high_hz)),
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn channel_layout() {
        let bank = build_filter_bank(50.0).unwrap();
        assert_eq!(bank.len(), 22);
        assert_eq!(
            bank.channels[0].kind,
            FilterKind::HighPass { cutoff_hz: 0.5 }
        );
        assert_eq!(
            bank.channels[2].kind,
            FilterKind::BandPass {
                low_hz: 0.5,
                high_hz: 2.9
            }
        );
        assert_eq!(
            bank.channels[3].kind,
            FilterKind::BandPass {
                low_hz: 0.5,
                high_hz: 2.5
            }
        );
        assert_eq!(
            bank.channels[12].kind,
            FilterKind::BandPass {
                low_hz: 1.2,
                high_hz: 7.0
            }
        );
        assert_eq!(
            bank.channels[21].kind,
            FilterKind::BandPass {
                low_hz: 6.4,
                high_hz: 7.0
            }
        );
    }

    #[test]
    fn rejects_low_rate() {
        assert!(matches!(
            build_filter_bank(14.0),
            Err(Error::InvalidSpec(_))
        ));
        assert!(build_filter_bank(15.0).is_ok());
    }

    #[test]
    fn bank_is_deterministic() {
        let a = build_filter_bank(50.0).unwrap();
        let b = build_filter_bank(50.0).unwrap();
        for (x, y) in a.channels.iter().zip(&b.channels) {
            let tx = design_fir(x, 50.0).unwrap();
            let ty = design_fir(y, 50.0).unwrap();
            assert!(tx.iter().zip(&ty).all(|(p, q)| p.to_bits() == q.to_bits()));
        }
    }

    #[test]
    fn constant_input_is_rejected_by_every_channel() {
        let bank = build_filter_bank(50.0).unwrap();
        let s = PpgSeries::new(50.0, 0, vec![2.0; 3000]).unwrap();
        let m = apply_filter_bank(&s, &bank).unwrap();
        assert_eq!(m.n_channels(), 22);
        assert_eq!(m.len(), 3000);
        let t = m.transient;
        for row in &m.rows {
            assert!(row[t..3000 - t].iter().all(|v| v.abs() < 1e-6));
        }
    }

    #[test]
    fn one_hertz_sine_selectivity() {
        let bank = build_filter_bank(50.0).unwrap();
        let x: Vec<f64> = (0..4000)
            .map(|i| (2.0 * PI * i as f64 / 50.0).sin())
            .collect();
        let m = apply_filter_bank(&PpgSeries::new(50.0, 0, x).unwrap(), &bank).unwrap();
        let peak = |row: &[f64]| row[1000..3000].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(20.0 * peak(&m.rows[1]).log10() >= -3.0);
        assert!(20.0 * peak(&m.rows[21]).log10() <= -50.0);
    }

    #[test]
    fn trim_shifts_start() {
        let bank = build_filter_bank(50.0).unwrap();
        let s = PpgSeries::new(50.0, 100, vec![0.0; 2000]).unwrap();
        let m = apply_filter_bank(&s, &bank).unwrap();
        let t = m.trim(m.transient).unwrap();
        assert_eq!(t.len(), 1000);
        assert_eq!(t.start_time_ms, 100 + 10_000);
        assert!(m.trim(1000).is_err());
    }
}
