//! Dilated causal temporal convolutional network for attention scoring.
//!
//! Each residual block is
//! `conv -> norm -> ReLU -> dropout -> conv -> norm -> ReLU -> dropout`, added
//! to the (projected) block input. Convolutions pad on the left only, so an
//! activation at time `t` never sees inputs after `t`. In strict mode the
//! network input is delayed by one sample, which makes every activation at
//! `t` depend on inputs up to `t - 1` only, residual paths included.
//!
//! The head averages the last block over time and applies a linear layer
//! and a two-way softmax; the score is the probability of the wakeful class.

mod checkpoint;
mod model;
mod params;
mod train;

pub use crate::optim::Optimizer;
pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint};
pub use model::{backward, forward, predict_score, Forward, Mode};
pub use params::{ConvLayer, NormLayer, TcnBlock, TcnParams};
pub use train::{accuracy, train, TrainOptions};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DilationSchedule {
    /// 2, 3, 4, ... (one more per block)
    Increment,
    /// 2, 4, 8, ...
    Doubling,
}

impl std::str::FromStr for DilationSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "increment" => Ok(Self::Increment),
            "doubling" => Ok(Self::Doubling),
            other => Err(Error::InvalidArgument(format!(
                "unknown dilation schedule `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TcnConfig {
    pub num_blocks: usize,
    pub kernel_size: usize,
    pub dilation_schedule: DilationSchedule,
    pub channels_per_block: usize,
    pub dropout_rate: f64,
    pub num_classes: usize,
    pub input_channels: usize,
    pub seed: u64,
    /// Delay the input by one sample so activation `t` ignores input `t`.
    pub strict_causal: bool,
}

impl Default for TcnConfig {
    fn default() -> Self {
        Self {
            num_blocks: 12,
            kernel_size: 3,
            dilation_schedule: DilationSchedule::Increment,
            channels_per_block: 16,
            dropout_rate: 0.1,
            num_classes: 2,
            input_channels: 22,
            seed: 0,
            strict_causal: true,
        }
    }
}

impl TcnConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.num_blocks == 0 {
            return bad("num_blocks must be at least 1".into());
        }
        if self.kernel_size < 2 {
            return bad(format!(
                "kernel_size must be at least 2, got {}",
                self.kernel_size
            ));
        }
        // Layer normalization across channels needs at least two of them.
        if self.channels_per_block < 2 {
            return bad(format!(
                "channels_per_block must be at least 2, got {}",
                self.channels_per_block
            ));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return bad(format!(
                "dropout_rate must be in [0, 1), got {}",
                self.dropout_rate
            ));
        }
        if self.num_classes != 2 {
            return bad(format!("num_classes must be 2, got {}", self.num_classes));
        }
        if self.input_channels == 0 {
            return bad("input_channels must be at least 1".into());
        }
        Ok(())
    }

    pub fn dilations(&self) -> Vec<usize> {
        (0..self.num_blocks)
            .map(|b| match self.dilation_schedule {
                DilationSchedule::Increment => 2 + b,
                DilationSchedule::Doubling => 2usize << b,
            })
            .collect()
    }
}

/// Number of consecutive input samples that can reach one activation of the
/// last block: `1 + sum_b 2 (k - 1) d_b`.
pub fn receptive_field(config: &TcnConfig) -> usize {
    1 + config
        .dilations()
        .iter()
        .map(|d| 2 * (config.kernel_size - 1) * d)
        .sum::<usize>()
}

/// Probability of the wakeful class for one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttentionScore {
    pub value: f64,
    pub window_start_ms: i64,
}

impl AttentionScore {
    pub fn new(value: f64, window_start_ms: i64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidArgument(format!(
                "attention score must be in [0, 1], got {value}"
            )));
        }
        Ok(Self {
            value,
            window_start_ms,
        })
    }
}
