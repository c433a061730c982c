use std::f64::consts::PI;

use super::PpgSeries;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterKind {
    LowPass {
        cutoff_hz: f64,
    },
    HighPass {
        cutoff_hz: f64,
    },
    /// Cascade of a high-pass at `low_hz` and a low-pass at `high_hz`.
    BandPass {
        low_hz: f64,
        high_hz: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FirDesign {
    #[default]
    WindowedSincHamming,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub kind: FilterKind,
    /// Taps per windowed-sinc stage. Must be odd.
    pub order: usize,
    pub design: FirDesign,
}

impl FilterSpec {
    pub fn low_pass(cutoff_hz: f64, order: usize) -> Self {
        Self::from_kind(FilterKind::LowPass { cutoff_hz }, order)
    }

    pub fn high_pass(cutoff_hz: f64, order: usize) -> Self {
        Self::from_kind(FilterKind::HighPass { cutoff_hz }, order)
    }

    pub fn band_pass(low_hz: f64, high_hz: f64, order: usize) -> Self {
        Self::from_kind(FilterKind::BandPass { low_hz, high_hz }, order)
    }

    fn from_kind(kind: FilterKind, order: usize) -> Self {
        Self {
            kind,
            order,
            design: FirDesign::WindowedSincHamming,
        }
    }

    /// Single-stage filters in application order.
    pub fn stages(&self) -> Vec<FilterSpec> {
        match self.kind {
            FilterKind::BandPass { low_hz, high_hz } => vec![
                FilterSpec::high_pass(low_hz, self.order),
                FilterSpec::low_pass(high_hz, self.order),
            ],
            _ => vec![*self],
        }
    }

    /// Samples at each edge affected by zero padding.
    pub fn transient_len(&self) -> usize {
        self.stages().len() * (self.order.saturating_sub(1) / 2)
    }

    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        if self.order == 0 || self.order.is_multiple_of(2) {
            return Err(Error::InvalidSpec(format!(
                "order must be odd and positive, got {}",
                self.order
            )));
        }
        let nyquist = sample_rate_hz / 2.0;
        let check = |hz: f64, what: &str| -> Result<()> {
            if !(hz.is_finite() && hz > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "{what} cutoff must be positive, got {hz}"
                )));
            }
            if hz >= nyquist {
                return Err(Error::InvalidSpec(format!(
                    "{what} cutoff {hz} Hz is not below Nyquist {nyquist} Hz"
                )));
            }
            Ok(())
        };
        match self.kind {
            FilterKind::LowPass { cutoff_hz } => check(cutoff_hz, "low-pass"),
            FilterKind::HighPass { cutoff_hz } => check(cutoff_hz, "high-pass"),
            FilterKind::BandPass { low_hz, high_hz } => {
                check(low_hz, "band-pass low")?;
                check(high_hz, "band-pass high")?;
                if low_hz >= high_hz {
                    return Err(Error::InvalidSpec(format!(
                        "band-pass needs low < high, got [{low_hz}, {high_hz}]"
                    )));
                }
                Ok(())
            }
        }
    }
}

fn hamming(n: usize, len: usize) -> f64 {
    if len == 1 {
        return 1.0;
    }
    0.54 - 0.46 * (2.0 * PI * n as f64 / (len - 1) as f64).cos()
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Hamming-windowed sinc low-pass with exact unity DC gain.
///
/// The residual `1 - sum(taps)` is spread evenly over all taps rather than
/// rescaling: a flat correction only moves the response inside a ~fs/order
/// band around DC, while rescaling tilts the whole passband ripple.
fn low_pass_taps(cutoff_hz: f64, sample_rate_hz: f64, order: usize) -> Vec<f64> {
    let fc = cutoff_hz / sample_rate_hz;
    let center = order / 2;
    let mut taps = vec![0.0; order];
    for n in 0..=center {
        let v = 2.0 * fc * sinc(2.0 * fc * (n as f64 - center as f64)) * hamming(n, order);
        taps[n] = v;
        taps[order - 1 - n] = v;
    }
    let residual = (1.0 - taps.iter().sum::<f64>()) / order as f64;
    for t in &mut taps {
        *t += residual;
    }
    taps
}

fn high_pass_taps(cutoff_hz: f64, sample_rate_hz: f64, order: usize) -> Vec<f64> {
    let mut taps = low_pass_taps(cutoff_hz, sample_rate_hz, order);
    for t in &mut taps {
        *t = -*t;
    }
    taps[order / 2] += 1.0;
    taps
}

/// Full convolution of two symmetric kernels. Only the first half is
/// summed; the second half is mirrored so the result is exactly symmetric.
fn convolve_symmetric(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len() + b.len() - 1;
    let mut out = vec![0.0; len];
    for i in 0..=(len - 1) / 2 {
        let lo = i.saturating_sub(b.len() - 1);
        let hi = i.min(a.len() - 1);
        let v: f64 = (lo..=hi).map(|j| a[j] * b[i - j]).sum();
        out[i] = v;
        out[len - 1 - i] = v;
    }
    out
}

/// Impulse response of `spec` at `sample_rate_hz`.
///
/// Single-stage filters return `order` taps. A band-pass returns the
/// convolution of its two stages (`2 * order - 1` taps), i.e. the response
/// of the cascade that [`apply_filter_bank`](super::apply_filter_bank) runs.
pub fn design_fir(spec: &FilterSpec, sample_rate_hz: f64) -> Result<Vec<f64>> {
    spec.validate(sample_rate_hz)?;
    let order = spec.order;
    Ok(match spec.kind {
        FilterKind::LowPass { cutoff_hz } => low_pass_taps(cutoff_hz, sample_rate_hz, order),
        FilterKind::HighPass { cutoff_hz } => high_pass_taps(cutoff_hz, sample_rate_hz, order),
        FilterKind::BandPass { low_hz, high_hz } => convolve_symmetric(
            &high_pass_taps(low_hz, sample_rate_hz, order),
            &low_pass_taps(high_hz, sample_rate_hz, order),
        ),
    })
}

/// Convolves with the group delay removed, zero padding outside the series.
///
/// `y[n] = sum_k taps[k] * x[n + c - k]` with `c = (len - 1) / 2`.
pub(crate) fn filter_centered(x: &[f64], taps: &[f64]) -> Vec<f64> {
    let n = x.len() as isize;
    let c = ((taps.len() - 1) / 2) as isize;
    let mut y = vec![0.0; x.len()];
    for (k, &tap) in taps.iter().enumerate() {
        let shift = c - k as isize;
        let lo = (-shift).max(0);
        let hi = (n - shift).min(n);
        if lo >= hi {
            continue;
        }
        let src = &x[(lo + shift) as usize..(hi + shift) as usize];
        for (o, &v) in y[lo as usize..hi as usize].iter_mut().zip(src) {
            *o += tap * v;
        }
    }
    y
}

pub fn apply_fir(series: &PpgSeries, taps: &[f64]) -> Result<PpgSeries> {
    if taps.is_empty() {
        return Err(Error::InvalidArgument(
            "filter taps must not be empty".into(),
        ));
    }
    Ok(series.with_samples(filter_centered(series.samples(), taps)))
}

/// [`decimate_with_order`] with the default stage order.
pub fn decimate(series: &PpgSeries, factor: usize) -> Result<PpgSeries> {
    decimate_with_order(series, factor, super::DEFAULT_FIR_ORDER)
}

/// Anti-alias low-pass at 0.8 of the new Nyquist rate, then keep every
/// `factor`-th sample.
///
/// The anti-alias filter pads by repeating the edge samples so that a
/// constant input stays constant all the way to the boundaries.
pub fn decimate_with_order(series: &PpgSeries, factor: usize, order: usize) -> Result<PpgSeries> {
    if factor == 0 {
        return Err(Error::InvalidArgument(
            "decimation factor must be at least 1".into(),
        ));
    }
    if series.len() < factor {
        return Err(Error::InvalidArgument(format!(
            "series of {} samples is shorter than decimation factor {factor}",
            series.len()
        )));
    }
    if factor == 1 {
        return Ok(series.clone());
    }
    let rate = series.sample_rate_hz();
    let cutoff = 0.8 * (rate / factor as f64 / 2.0);
    let spec = FilterSpec::low_pass(cutoff, order);
    let taps = design_fir(&spec, rate)?;
    let x = series.samples();
    let n = x.len() as isize;
    let c = (order / 2) as isize;
    let out_len = x.len() / factor;
    let out: Vec<f64> = (0..out_len)
        .map(|m| {
            let center = (m * factor) as isize;
            taps.iter()
                .enumerate()
                .map(|(k, &tap)| {
                    let idx = (center + c - k as isize).clamp(0, n - 1);
                    tap * x[idx as usize]
                })
                .sum()
        })
        .collect();
    PpgSeries::new(rate / factor as f64, series.start_time_ms(), out)
}
