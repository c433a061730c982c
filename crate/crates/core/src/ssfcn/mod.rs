//! Toy-scale video saliency network: a 3D convolutional encoder, a temporal
//! bridge and a 2D decoder with a sigmoid head.
//!
//! Encoder block: `conv3d 3x3x3, norm, ReLU, conv3d 3x3x3, norm, ReLU,
//! maxpool 1x2x2`. Decoder block: `upsample 2x, conv 3x3, norm, ReLU` plus
//! the upsampled input (through a 1x1 projection when widths differ). The
//! head is a 1x1 convolution with bias followed by a sigmoid.

mod checkpoint;
mod clip;
mod model;
mod ops;
mod params;
mod preprocess;
mod train;

use std::str::FromStr;

pub use crate::optim::Optimizer;
pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint};
pub use clip::VideoClip;
pub use model::{bce_loss, ssfcn_forward, ssfcn_loss_and_grad, trace, SsfcnTrace};
pub use params::{Conv, DecoderBlock, EncoderBlock, Norm, SsfcnParams};
pub use preprocess::{frames_to_clips, preprocess_clip};
pub use train::{ssfcn_train_step, train, SsfcnTrainer, TrainOptions};

use crate::{Error, Result};

/// How the encoder output is collapsed over time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bridge {
    Mean,
    Max,
}

impl FromStr for Bridge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Bridge::Mean),
            "max" => Ok(Bridge::Max),
            other => Err(Error::InvalidArgument(format!("unknown bridge `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsfcnConfig {
    pub clip_len: usize,
    /// One entry per encoder block; the decoder has as many blocks.
    pub encoder_channels: Vec<usize>,
    pub input_channels: usize,
    pub seed: u64,
    pub learning_rate: f64,
    pub bridge: Bridge,
    /// Factorize each 3x3x3 convolution into 1x3x3 then 3x1x1.
    pub separable: bool,
}

impl Default for SsfcnConfig {
    fn default() -> Self {
        Self {
            clip_len: 8,
            encoder_channels: vec![8, 16, 32, 64, 64],
            input_channels: 1,
            seed: 0,
            learning_rate: 0.01,
            bridge: Bridge::Mean,
            separable: false,
        }
    }
}

impl SsfcnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.clip_len == 0 {
            return Err(Error::InvalidArgument("clip_len must be at least 1".into()));
        }
        if self.encoder_channels.is_empty() || self.encoder_channels.len() > 8 {
            return Err(Error::InvalidArgument(format!(
                "encoder needs 1 to 8 blocks, got {}",
                self.encoder_channels.len()
            )));
        }
        if self.encoder_channels.contains(&0) {
            return Err(Error::InvalidArgument(
                "encoder channel widths must be positive".into(),
            ));
        }
        if self.input_channels != 1 && self.input_channels != 3 {
            return Err(Error::InvalidArgument(format!(
                "input_channels must be 1 or 3, got {}",
                self.input_channels
            )));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }

    pub fn num_blocks(&self) -> usize {
        self.encoder_channels.len()
    }

    /// Frame height and width must be multiples of this.
    pub fn spatial_multiple(&self) -> usize {
        1 << self.num_blocks()
    }

    /// Decoder widths mirror the encoder: block `i` has the width of encoder
    /// block `n - 2 - i`, and the last block keeps the first encoder width.
    pub fn decoder_channels(&self) -> Vec<usize> {
        let e = &self.encoder_channels;
        let n = e.len();
        (0..n)
            .map(|i| if i + 1 < n { e[n - 2 - i] } else { e[0] })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoder_widths_mirror_encoder() {
        let cfg = SsfcnConfig::default();
        assert_eq!(cfg.decoder_channels(), vec![64, 32, 16, 8, 8]);
        assert_eq!(cfg.spatial_multiple(), 32);
        let mini = SsfcnConfig {
            encoder_channels: vec![2, 3],
            ..cfg
        };
        assert_eq!(mini.decoder_channels(), vec![2, 2]);
    }

    #[test]
    fn validation() {
        let ok = SsfcnConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            SsfcnConfig {
                clip_len: 0,
                ..ok.clone()
            },
            SsfcnConfig {
                encoder_channels: vec![],
                ..ok.clone()
            },
            SsfcnConfig {
                encoder_channels: vec![4, 0],
                ..ok.clone()
            },
            SsfcnConfig {
                input_channels: 2,
                ..ok.clone()
            },
            SsfcnConfig {
                learning_rate: 0.0,
                ..ok.clone()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
        assert_eq!("max".parse::<Bridge>().unwrap(), Bridge::Max);
        assert!("median".parse::<Bridge>().is_err());
    }
}
