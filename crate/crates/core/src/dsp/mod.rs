//! PPG signal conditioning: FIR design, the 22-channel hyper-filter bank,
//! derivative-based waveform features and window segmentation.

mod bank;
mod features;
mod fir;
mod series;
mod window;

pub use bank::{
    apply_filter_bank, build_filter_bank, build_filter_bank_with_order, FilterBankSpec,
    HyperMatrix, BANK_CHANNELS,
};
pub use features::{derivative, detect_extrema, ExtremaList};
pub use fir::{
    apply_fir, decimate, decimate_with_order, design_fir, FilterKind, FilterSpec, FirDesign,
};
pub use series::PpgSeries;
pub use window::{segment_windows, HyperPatternWindow, Label};

/// Native acquisition rate of the recordings.
pub const NATIVE_RATE_HZ: f64 = 1000.0;
/// Decimation factor from the native rate down to the filter-bank rate.
pub const DEFAULT_DECIMATE_FACTOR: usize = 20;
/// Taps per windowed-sinc stage.
pub const DEFAULT_FIR_ORDER: usize = 501;
