use super::SsfcnConfig;
use crate::nn::glorot;
use crate::seed;
use crate::Result;

/// Same-padded convolution; `bias` is empty for convolutions that feed a
/// normalization layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Conv {
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel: [usize; 3],
    /// `out x in x kt x kh x kw`
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Conv {
    fn new(in_channels: usize, out_channels: usize, kernel: [usize; 3], with_bias: bool) -> Self {
        let kv: usize = kernel.iter().product();
        Self {
            in_channels,
            out_channels,
            kernel,
            weight: vec![0.0; out_channels * in_channels * kv],
            bias: if with_bias {
                vec![0.0; out_channels]
            } else {
                Vec::new()
            },
        }
    }

    fn randomize(&mut self, rng: &mut rand_chacha::ChaCha8Rng) {
        let kv: usize = self.kernel.iter().product();
        self.weight = glorot(
            rng,
            self.weight.len(),
            self.in_channels * kv,
            self.out_channels * kv,
        );
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Norm {
    pub scale: Vec<f64>,
    pub shift: Vec<f64>,
}

impl Norm {
    fn new(channels: usize, scale: f64) -> Self {
        Self {
            scale: vec![scale; channels],
            shift: vec![0.0; channels],
        }
    }
}

/// Each `conv` is a single 3x3x3 convolution, or a 1x3x3 followed by a 3x1x1
/// in the separable variant.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderBlock {
    pub conv1: Vec<Conv>,
    pub norm1: Norm,
    pub conv2: Vec<Conv>,
    pub norm2: Norm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderBlock {
    pub conv: Conv,
    pub norm: Norm,
    pub projection: Option<Conv>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsfcnParams {
    pub config: SsfcnConfig,
    pub encoder: Vec<EncoderBlock>,
    pub decoder: Vec<DecoderBlock>,
    pub head: Conv,
}

fn conv_unit(cin: usize, cout: usize, separable: bool) -> Vec<Conv> {
    if separable {
        vec![
            Conv::new(cin, cout, [1, 3, 3], false),
            Conv::new(cout, cout, [3, 1, 1], false),
        ]
    } else {
        vec![Conv::new(cin, cout, [3, 3, 3], false)]
    }
}

impl SsfcnParams {
    /// Glorot-uniform convolutions, unit norm scales, zero shifts and bias.
    pub fn init(config: &SsfcnConfig) -> Result<Self> {
        let mut p = Self::build(config, 1.0)?;
        let mut rng = seed::rng(seed::derive_seed(config.seed, "ssfcn.init"));
        p.for_each_conv_mut(|c| c.randomize(&mut rng));
        Ok(p)
    }

    /// Every parameter zero, including norm scales.
    pub fn zeros(config: &SsfcnConfig) -> Result<Self> {
        Self::build(config, 0.0)
    }

    fn build(config: &SsfcnConfig, norm_scale: f64) -> Result<Self> {
        config.validate()?;
        let mut encoder = Vec::new();
        let mut cin = config.input_channels;
        for &c in &config.encoder_channels {
            encoder.push(EncoderBlock {
                conv1: conv_unit(cin, c, config.separable),
                norm1: Norm::new(c, norm_scale),
                conv2: conv_unit(c, c, config.separable),
                norm2: Norm::new(c, norm_scale),
            });
            cin = c;
        }
        let mut decoder = Vec::new();
        for d in config.decoder_channels() {
            decoder.push(DecoderBlock {
                conv: Conv::new(cin, d, [1, 3, 3], false),
                norm: Norm::new(d, norm_scale),
                projection: (cin != d).then(|| Conv::new(cin, d, [1, 1, 1], false)),
            });
            cin = d;
        }
        Ok(Self {
            config: config.clone(),
            encoder,
            decoder,
            head: Conv::new(cin, 1, [1, 1, 1], true),
        })
    }

    fn for_each_conv_mut(&mut self, mut f: impl FnMut(&mut Conv)) {
        for b in &mut self.encoder {
            b.conv1
                .iter_mut()
                .chain(b.conv2.iter_mut())
                .for_each(&mut f);
        }
        for b in &mut self.decoder {
            f(&mut b.conv);
            if let Some(p) = &mut b.projection {
                f(p);
            }
        }
        f(&mut self.head);
    }

    /// Every tensor in a fixed order: encoder blocks (conv1 weights, norm1
    /// scale and shift, conv2 weights, norm2 scale and shift), decoder blocks
    /// (conv weight, norm scale and shift, projection), head weight and bias.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::new();
        for b in &self.encoder {
            out.extend(b.conv1.iter().map(|c| &c.weight[..]));
            out.extend([&b.norm1.scale[..], &b.norm1.shift]);
            out.extend(b.conv2.iter().map(|c| &c.weight[..]));
            out.extend([&b.norm2.scale[..], &b.norm2.shift]);
        }
        for b in &self.decoder {
            out.extend([&b.conv.weight[..], &b.norm.scale, &b.norm.shift]);
            if let Some(p) = &b.projection {
                out.push(&p.weight);
            }
        }
        out.push(&self.head.weight);
        out.push(&self.head.bias);
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Vec<f64>> {
        let mut out: Vec<&mut Vec<f64>> = Vec::new();
        for b in &mut self.encoder {
            out.extend(b.conv1.iter_mut().map(|c| &mut c.weight));
            out.extend([&mut b.norm1.scale, &mut b.norm1.shift]);
            out.extend(b.conv2.iter_mut().map(|c| &mut c.weight));
            out.extend([&mut b.norm2.scale, &mut b.norm2.shift]);
        }
        for b in &mut self.decoder {
            out.extend([&mut b.conv.weight, &mut b.norm.scale, &mut b.norm.shift]);
            if let Some(p) = &mut b.projection {
                out.push(&mut p.weight);
            }
        }
        out.push(&mut self.head.weight);
        out.push(&mut self.head.bias);
        out
    }

    pub fn num_parameters(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: f64, other: &SsfcnParams) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            crate::nn::axpy(a, alpha, b);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.iter().all(|v| v.is_finite()))
    }
}
