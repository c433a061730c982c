use crate::{Error, Result};

/// Uniformly sampled PPG amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct PpgSeries {
    sample_rate_hz: f64,
    start_time_ms: i64,
    samples: Vec<f64>,
}

impl PpgSeries {
    pub fn new(sample_rate_hz: f64, start_time_ms: i64, samples: Vec<f64>) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InvalidArgument(
                "series must hold at least one sample".into(),
            ));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("sample {i} is not finite")));
        }
        Ok(Self {
            sample_rate_hz,
            start_time_ms,
            samples,
        })
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn start_time_ms(&self) -> i64 {
        self.start_time_ms
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_ms(&self) -> f64 {
        self.samples.len() as f64 * 1000.0 / self.sample_rate_hz
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Same timing, new samples. Values are trusted to be finite.
    pub(crate) fn with_samples(&self, samples: Vec<f64>) -> Self {
        debug_assert!(!samples.is_empty());
        Self {
            sample_rate_hz: self.sample_rate_hz,
            start_time_ms: self.start_time_ms,
            samples,
        }
    }
}
