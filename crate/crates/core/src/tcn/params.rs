use super::TcnConfig;
use crate::nn::glorot;
use crate::{seed, Result};

/// Dilated convolution weights, `out x in x kernel`, plus one bias per output.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormLayer {
    pub scale: Vec<f64>,
    pub shift: Vec<f64>,
}

impl NormLayer {
    fn identity(channels: usize) -> Self {
        Self {
            scale: vec![1.0; channels],
            shift: vec![0.0; channels],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TcnBlock {
    pub in_channels: usize,
    pub out_channels: usize,
    pub dilation: usize,
    pub conv1: ConvLayer,
    pub norm1: NormLayer,
    pub conv2: ConvLayer,
    pub norm2: NormLayer,
    /// 1x1 residual projection, `out x in`, present when the widths differ.
    pub projection: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TcnParams {
    pub config: TcnConfig,
    pub blocks: Vec<TcnBlock>,
    /// `num_classes x channels`
    pub head_weight: Vec<f64>,
    pub head_bias: Vec<f64>,
}

impl TcnParams {
    /// Glorot-uniform weights from `config.seed`, zero biases, identity norms.
    pub fn init(config: &TcnConfig) -> Result<Self> {
        Self::build(config, true)
    }

    /// Same shapes as [`init`](Self::init), every value zero. Used for
    /// gradient accumulators.
    pub fn zeros(config: &TcnConfig) -> Result<Self> {
        let mut p = Self::build(config, false)?;
        p.tensors_mut().into_iter().for_each(|t| t.fill(0.0));
        Ok(p)
    }

    fn build(config: &TcnConfig, random: bool) -> Result<Self> {
        config.validate()?;
        let mut rng = seed::rng(seed::derive_seed(config.seed, "tcn.init"));
        let k = config.kernel_size;
        let c = config.channels_per_block;
        let mut draw = |len: usize, fan_in: usize, fan_out: usize| {
            if random {
                glorot(&mut rng, len, fan_in, fan_out)
            } else {
                vec![0.0; len]
            }
        };
        let mut blocks = Vec::with_capacity(config.num_blocks);
        for (b, dilation) in config.dilations().into_iter().enumerate() {
            let cin = if b == 0 { config.input_channels } else { c };
            let conv1 = ConvLayer {
                weight: draw(c * cin * k, cin * k, c * k),
                bias: vec![0.0; c],
            };
            let conv2 = ConvLayer {
                weight: draw(c * c * k, c * k, c * k),
                bias: vec![0.0; c],
            };
            let projection = (cin != c).then(|| draw(c * cin, cin, c));
            blocks.push(TcnBlock {
                in_channels: cin,
                out_channels: c,
                dilation,
                conv1,
                norm1: NormLayer::identity(c),
                conv2,
                norm2: NormLayer::identity(c),
                projection,
            });
        }
        let head_weight = draw(config.num_classes * c, c, config.num_classes);
        Ok(Self {
            config: config.clone(),
            blocks,
            head_weight,
            head_bias: vec![0.0; config.num_classes],
        })
    }

    /// Every tensor in declaration order: per block conv1 weight and bias,
    /// norm1 scale and shift, conv2 weight and bias, norm2 scale and shift,
    /// projection (if any); then head weight and head bias.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::new();
        for b in &self.blocks {
            out.extend([
                &b.conv1.weight[..],
                &b.conv1.bias,
                &b.norm1.scale,
                &b.norm1.shift,
                &b.conv2.weight,
                &b.conv2.bias,
                &b.norm2.scale,
                &b.norm2.shift,
            ]);
            if let Some(p) = &b.projection {
                out.push(p);
            }
        }
        out.push(&self.head_weight);
        out.push(&self.head_bias);
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Vec<f64>> {
        let mut out: Vec<&mut Vec<f64>> = Vec::new();
        for b in &mut self.blocks {
            out.extend([
                &mut b.conv1.weight,
                &mut b.conv1.bias,
                &mut b.norm1.scale,
                &mut b.norm1.shift,
                &mut b.conv2.weight,
                &mut b.conv2.bias,
                &mut b.norm2.scale,
                &mut b.norm2.shift,
            ]);
            if let Some(p) = &mut b.projection {
                out.push(p);
            }
        }
        out.push(&mut self.head_weight);
        out.push(&mut self.head_bias);
        out
    }

    pub fn num_parameters(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// `self += alpha * other`, tensor by tensor.
    pub fn add_scaled(&mut self, alpha: f64, other: &TcnParams) {
        for (dst, src) in self.tensors_mut().into_iter().zip(other.tensors()) {
            crate::nn::axpy(dst, alpha, src);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.iter().all(|v| v.is_finite()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_is_seeded() {
        let cfg = TcnConfig::default();
        let a = TcnParams::init(&cfg).unwrap();
        let b = TcnParams::init(&cfg).unwrap();
        assert!(a
            .tensors()
            .iter()
            .zip(b.tensors())
            .all(|(x, y)| x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits())));
        let c = TcnParams::init(&TcnConfig {
            seed: 2,
            ..cfg.clone()
        })
        .unwrap();
        let d = TcnParams::init(&TcnConfig { seed: 1, ..cfg }).unwrap();
        assert_ne!(c.head_weight, d.head_weight);
    }

    #[test]
    fn default_shapes() {
        let p = TcnParams::init(&TcnConfig::default()).unwrap();
        assert_eq!(p.blocks.len(), 12);
        assert_eq!(p.head_weight.len(), 2 * 16);
        assert_eq!(p.blocks[0].conv1.weight.len(), 16 * 22 * 3);
        assert!(p.blocks[0].projection.is_some());
        assert!(p.blocks[1].projection.is_none());
        assert!(p
            .blocks
            .iter()
            .all(|b| b.conv1.bias.iter().all(|v| *v == 0.0)));
        assert!(p
            .blocks
            .iter()
            .all(|b| b.norm1.scale.iter().all(|v| *v == 1.0)));
    }

    #[test]
    fn glorot_bounds() {
        let p = TcnParams::init(&TcnConfig::default()).unwrap();
        let limit = (6.0f64 / (22.0 * 3.0 + 16.0 * 3.0)).sqrt();
        assert!(p.blocks[0].conv1.weight.iter().all(|w| w.abs() <= limit));
    }
}
