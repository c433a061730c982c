use rand::Rng;

use super::params::{ConvLayer, NormLayer, TcnBlock};
use super::{AttentionScore, TcnParams};
use crate::dsp::HyperPatternWindow;
use crate::nn::{axpy, dot, softmax};
use crate::{seed, Error, Result};

const NORM_EPS: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Eval,
    /// Dropout active; channel masks drawn from `dropout_seed`.
    Train {
        dropout_seed: u64,
    },
}

#[derive(Debug, Clone)]
struct NormCache {
    xhat: Vec<f64>,
    rstd: Vec<f64>,
    /// Affine output, before ReLU.
    y: Vec<f64>,
}

#[derive(Debug, Clone)]
struct BlockCache {
    input: Vec<f64>,
    norm1: NormCache,
    mask1: Vec<f64>,
    hidden: Vec<f64>,
    norm2: NormCache,
    mask2: Vec<f64>,
    output: Vec<f64>,
}

/// Result of a forward pass, holding what backprop needs.
#[derive(Debug, Clone)]
pub struct Forward {
    pub probs: Vec<f64>,
    pub score: AttentionScore,
    logits: Vec<f64>,
    len: usize,
    pooled: Vec<f64>,
    blocks: Vec<BlockCache>,
}

impl Forward {
    /// Every per-time activation tensor, block by block: network input as
    /// seen by block 0, normalized first conv, hidden, normalized second
    /// conv, block output. Each is `channels x len`, row-major.
    pub fn activations(&self) -> Vec<&[f64]> {
        let mut out = Vec::new();
        for b in &self.blocks {
            out.push(&b.input[..]);
            out.push(&b.norm1.y[..]);
            out.push(&b.hidden[..]);
            out.push(&b.norm2.y[..]);
            out.push(&b.output[..]);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Cross-entropy of `class` under the softmax head.
    pub fn loss(&self, class: usize) -> f64 {
        let max = self
            .logits
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let lse = max
            + self
                .logits
                .iter()
                .map(|z| (z - max).exp())
                .sum::<f64>()
                .ln();
        lse - self.logits[class]
    }
}

/// Left-padded dilated convolution:
/// `y[o, t] = b[o] + sum_{i, j} w[o, i, j] x[i, t - (k - 1 - j) d]`.
fn conv_forward(
    x: &[f64],
    cin: usize,
    len: usize,
    layer: &ConvLayer,
    cout: usize,
    k: usize,
    d: usize,
) -> Vec<f64> {
    let mut y = vec![0.0; cout * len];
    for (o, yo) in y.chunks_exact_mut(len).enumerate() {
        yo.fill(layer.bias[o]);
        for (i, xi) in x.chunks_exact(len).enumerate().take(cin) {
            for j in 0..k {
                let lag = (k - 1 - j) * d;
                if lag >= len {
                    continue;
                }
                axpy(
                    &mut yo[lag..],
                    layer.weight[(o * cin + i) * k + j],
                    &xi[..len - lag],
                );
            }
        }
    }
    y
}

/// Accumulates weight and bias gradients; returns the input gradient when
/// `want_dx` is set.
#[allow(clippy::too_many_arguments)]
fn conv_backward(
    x: &[f64],
    dy: &[f64],
    cin: usize,
    len: usize,
    layer: &ConvLayer,
    grad: &mut ConvLayer,
    k: usize,
    d: usize,
    want_dx: bool,
) -> Option<Vec<f64>> {
    let mut dx = want_dx.then(|| vec![0.0; cin * len]);
    for (o, dyo) in dy.chunks_exact(len).enumerate() {
        grad.bias[o] += dyo.iter().sum::<f64>();
        for i in 0..cin {
            let xi = &x[i * len..(i + 1) * len];
            for j in 0..k {
                let lag = (k - 1 - j) * d;
                if lag >= len {
                    continue;
                }
                let widx = (o * cin + i) * k + j;
                grad.weight[widx] += dot(&dyo[lag..], &xi[..len - lag]);
                if let Some(dx) = dx.as_mut() {
                    axpy(
                        &mut dx[i * len..(i + 1) * len - lag],
                        layer.weight[widx],
                        &dyo[lag..],
                    );
                }
            }
        }
    }
    dx
}

/// Normalizes across channels at every time step, then applies the
/// per-channel scale and shift. Touches no other time step, so causality is
/// preserved.
fn norm_forward(a: &[f64], c: usize, len: usize, norm: &NormLayer) -> NormCache {
    let mut mean = vec![0.0; len];
    for row in a.chunks_exact(len) {
        axpy(&mut mean, 1.0, row);
    }
    mean.iter_mut().for_each(|m| *m /= c as f64);
    let mut var = vec![0.0; len];
    for row in a.chunks_exact(len) {
        for ((v, &x), &m) in var.iter_mut().zip(row).zip(&mean) {
            *v += (x - m) * (x - m);
        }
    }
    let rstd: Vec<f64> = var
        .iter()
        .map(|v| 1.0 / (v / c as f64 + NORM_EPS).sqrt())
        .collect();
    let mut xhat = vec![0.0; c * len];
    let mut y = vec![0.0; c * len];
    for ch in 0..c {
        let row = &a[ch * len..(ch + 1) * len];
        let (s, b) = (norm.scale[ch], norm.shift[ch]);
        for t in 0..len {
            let xh = (row[t] - mean[t]) * rstd[t];
            xhat[ch * len + t] = xh;
            y[ch * len + t] = s * xh + b;
        }
    }
    NormCache { xhat, rstd, y }
}

fn norm_backward(
    dy: &[f64],
    cache: &NormCache,
    c: usize,
    len: usize,
    norm: &NormLayer,
    grad: &mut NormLayer,
) -> Vec<f64> {
    let mut dxhat = vec![0.0; c * len];
    let mut m1 = vec![0.0; len];
    let mut m2 = vec![0.0; len];
    for ch in 0..c {
        let dyr = &dy[ch * len..(ch + 1) * len];
        let xr = &cache.xhat[ch * len..(ch + 1) * len];
        grad.scale[ch] += dot(dyr, xr);
        grad.shift[ch] += dyr.iter().sum::<f64>();
        let s = norm.scale[ch];
        for t in 0..len {
            let g = dyr[t] * s;
            dxhat[ch * len + t] = g;
            m1[t] += g;
            m2[t] += g * xr[t];
        }
    }
    let inv_c = 1.0 / c as f64;
    for ch in 0..c {
        for t in 0..len {
            let i = ch * len + t;
            dxhat[i] = cache.rstd[t] * (dxhat[i] - m1[t] * inv_c - cache.xhat[i] * m2[t] * inv_c);
        }
    }
    dxhat
}

fn relu_dropout(y: &[f64], mask: &[f64], len: usize) -> Vec<f64> {
    y.chunks_exact(len)
        .zip(mask)
        .flat_map(|(row, &m)| row.iter().map(move |&v| v.max(0.0) * m))
        .collect()
}

fn relu_dropout_backward(du: &[f64], y: &[f64], mask: &[f64], len: usize) -> Vec<f64> {
    du.iter()
        .zip(y)
        .enumerate()
        .map(|(i, (&g, &v))| if v > 0.0 { g * mask[i / len] } else { 0.0 })
        .collect()
}

fn dropout_mask(rng: Option<&mut rand_chacha::ChaCha8Rng>, channels: usize, rate: f64) -> Vec<f64> {
    match rng {
        Some(rng) if rate > 0.0 => {
            let keep = 1.0 / (1.0 - rate);
            (0..channels)
                .map(|_| if rng.gen::<f64>() < rate { 0.0 } else { keep })
                .collect()
        }
        _ => vec![1.0; channels],
    }
}

fn block_forward(
    block: &TcnBlock,
    input: Vec<f64>,
    len: usize,
    k: usize,
    rate: f64,
    mut rng: Option<&mut rand_chacha::ChaCha8Rng>,
) -> BlockCache {
    let (cin, c, d) = (block.in_channels, block.out_channels, block.dilation);
    let a1 = conv_forward(&input, cin, len, &block.conv1, c, k, d);
    let norm1 = norm_forward(&a1, c, len, &block.norm1);
    let mask1 = dropout_mask(rng.as_deref_mut(), c, rate);
    let hidden = relu_dropout(&norm1.y, &mask1, len);
    let a2 = conv_forward(&hidden, c, len, &block.conv2, c, k, d);
    let norm2 = norm_forward(&a2, c, len, &block.norm2);
    let mask2 = dropout_mask(rng, c, rate);
    let mut output = relu_dropout(&norm2.y, &mask2, len);
    match &block.projection {
        Some(p) => {
            for (o, out_row) in output.chunks_exact_mut(len).enumerate() {
                for (i, in_row) in input.chunks_exact(len).enumerate() {
                    axpy(out_row, p[o * cin + i], in_row);
                }
            }
        }
        None => axpy(&mut output, 1.0, &input),
    }
    BlockCache {
        input,
        norm1,
        mask1,
        hidden,
        norm2,
        mask2,
        output,
    }
}

pub fn forward(params: &TcnParams, window: &HyperPatternWindow, mode: Mode) -> Result<Forward> {
    let cfg = &params.config;
    if window.n_channels() != cfg.input_channels {
        return Err(Error::Shape(format!(
            "window has {} channels, network expects {}",
            window.n_channels(),
            cfg.input_channels
        )));
    }
    let len = window.len();
    let mut x = window.data().to_vec();
    if cfg.strict_causal {
        for row in x.chunks_exact_mut(len) {
            row.copy_within(0..len - 1, 1);
            row[0] = 0.0;
        }
    }
    let mut rng = match mode {
        Mode::Eval => None,
        Mode::Train { dropout_seed } => Some(seed::rng(dropout_seed)),
    };
    let rate = match mode {
        Mode::Eval => 0.0,
        Mode::Train { .. } => cfg.dropout_rate,
    };
    let mut blocks: Vec<BlockCache> = Vec::with_capacity(params.blocks.len());
    for block in &params.blocks {
        let input = blocks
            .last()
            .map_or_else(|| x.clone(), |b| b.output.clone());
        blocks.push(block_forward(
            block,
            input,
            len,
            cfg.kernel_size,
            rate,
            rng.as_mut(),
        ));
    }
    let last = &blocks.last().expect("at least one block").output;
    let pooled: Vec<f64> = last
        .chunks_exact(len)
        .map(|row| row.iter().sum::<f64>() / len as f64)
        .collect();
    let logits: Vec<f64> = params
        .head_weight
        .chunks_exact(pooled.len())
        .zip(&params.head_bias)
        .map(|(w, b)| dot(w, &pooled) + b)
        .collect();
    let probs = softmax(&logits);
    let score = AttentionScore {
        value: probs[1].clamp(0.0, 1.0),
        window_start_ms: window.window_start_ms,
    };
    Ok(Forward {
        probs,
        score,
        logits,
        len,
        pooled,
        blocks,
    })
}

/// Cross-entropy loss for `class` and its gradient with respect to every
/// parameter.
pub fn backward(params: &TcnParams, fwd: &Forward, class: usize) -> Result<(f64, TcnParams)> {
    let cfg = &params.config;
    let mut grad = TcnParams::zeros(cfg)?;
    let len = fwd.len;
    let c = cfg.channels_per_block;
    let k = cfg.kernel_size;

    let mut dlogits = fwd.probs.clone();
    dlogits[class] -= 1.0;
    let mut dpooled = vec![0.0; c];
    for (cls, &g) in dlogits.iter().enumerate() {
        grad.head_bias[cls] += g;
        axpy(
            &mut grad.head_weight[cls * c..(cls + 1) * c],
            g,
            &fwd.pooled,
        );
        axpy(&mut dpooled, g, &params.head_weight[cls * c..(cls + 1) * c]);
    }
    let mut dout: Vec<f64> = dpooled
        .iter()
        .flat_map(|&g| std::iter::repeat_n(g / len as f64, len))
        .collect();

    for (b, (block, cache)) in params.blocks.iter().zip(&fwd.blocks).enumerate().rev() {
        let g = &mut grad.blocks[b];
        let cin = block.in_channels;
        let d = block.dilation;
        let dy2 = relu_dropout_backward(&dout, &cache.norm2.y, &cache.mask2, len);
        let da2 = norm_backward(&dy2, &cache.norm2, c, len, &block.norm2, &mut g.norm2);
        let dhidden = conv_backward(
            &cache.hidden,
            &da2,
            c,
            len,
            &block.conv2,
            &mut g.conv2,
            k,
            d,
            true,
        )
        .expect("requested");
        let dy1 = relu_dropout_backward(&dhidden, &cache.norm1.y, &cache.mask1, len);
        let da1 = norm_backward(&dy1, &cache.norm1, c, len, &block.norm1, &mut g.norm1);
        let dx = conv_backward(
            &cache.input,
            &da1,
            cin,
            len,
            &block.conv1,
            &mut g.conv1,
            k,
            d,
            b > 0,
        );
        if let Some(gp) = g.projection.as_mut() {
            for (o, drow) in dout.chunks_exact(len).enumerate() {
                for (i, xrow) in cache.input.chunks_exact(len).enumerate() {
                    gp[o * cin + i] += dot(drow, xrow);
                }
            }
        }
        let Some(mut dx) = dx else { break };
        match &block.projection {
            Some(p) => {
                for (o, drow) in dout.chunks_exact(len).enumerate() {
                    for i in 0..cin {
                        axpy(&mut dx[i * len..(i + 1) * len], p[o * cin + i], drow);
                    }
                }
            }
            None => axpy(&mut dx, 1.0, &dout),
        }
        dout = dx;
    }
    Ok((fwd.loss(class), grad))
}

pub fn predict_score(params: &TcnParams, window: &HyperPatternWindow) -> Result<AttentionScore> {
    Ok(forward(params, window, Mode::Eval)?.score)
}
