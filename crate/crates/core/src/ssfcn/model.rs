use super::ops::{
    conv_backward, conv_forward, maxpool_backward, maxpool_forward, norm_backward, norm_forward,
    relu_in_place, relu_mask, upsample_backward, upsample_forward, NormCache, Tensor,
};
use super::params::{Conv, Norm};
use super::{Bridge, SsfcnParams, VideoClip};
use crate::nn::{sigmoid, softplus};
use crate::saliency::SaliencyMap;
use crate::{Error, Result};

struct EncoderTrace {
    /// Input of every convolution in the first unit.
    unit1: Vec<Tensor>,
    norm1: NormCache,
    /// `unit2[0]` is the first ReLU output.
    unit2: Vec<Tensor>,
    norm2: NormCache,
    relu2: Tensor,
    pool_idx: Vec<usize>,
}

struct DecoderTrace {
    up: Tensor,
    norm: NormCache,
    relu: Tensor,
}

/// Cached activations of one forward pass.
pub struct SsfcnTrace {
    encoder: Vec<EncoderTrace>,
    encoded: Tensor,
    bridge_idx: Vec<usize>,
    decoder: Vec<DecoderTrace>,
    head_input: Tensor,
    logits: Vec<f64>,
    frame_ms: i64,
}

impl SsfcnTrace {
    /// Encoder output shape as `(T, H, W, C)`, before the bridge.
    pub fn encoder_shape(&self) -> (usize, usize, usize, usize) {
        let e = &self.encoded;
        (e.t, e.h, e.w, e.c)
    }

    /// Output `(H, W)`.
    pub fn output_shape(&self) -> (usize, usize) {
        (self.head_input.h, self.head_input.w)
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub fn map(&self) -> SaliencyMap {
        let (h, w) = self.output_shape();
        let values = self.logits.iter().map(|&z| sigmoid(z)).collect();
        SaliencyMap::new(h, w, values, self.frame_ms).expect("sigmoid output lies in [0, 1]")
    }
}

fn unit_forward(x: Tensor, convs: &[Conv]) -> (Vec<Tensor>, Tensor) {
    let mut inputs = Vec::with_capacity(convs.len());
    let mut cur = x;
    for c in convs {
        let next = conv_forward(&cur, c.out_channels, c.kernel, &c.weight, &c.bias);
        inputs.push(cur);
        cur = next;
    }
    (inputs, cur)
}

fn norm_relu(x: &Tensor, norm: &Norm) -> (Tensor, NormCache) {
    let (mut y, cache) = norm_forward(x, &norm.scale, &norm.shift);
    relu_in_place(&mut y);
    (y, cache)
}

fn check_clip(params: &SsfcnParams, clip: &VideoClip) -> Result<()> {
    let cfg = &params.config;
    if clip.t_len() != cfg.clip_len {
        return Err(Error::Shape(format!(
            "clip has {} frames, model expects {}",
            clip.t_len(),
            cfg.clip_len
        )));
    }
    if clip.channels() != cfg.input_channels {
        return Err(Error::Shape(format!(
            "clip has {} channels, model expects {}",
            clip.channels(),
            cfg.input_channels
        )));
    }
    let m = cfg.spatial_multiple();
    if !clip.height().is_multiple_of(m) || !clip.width().is_multiple_of(m) {
        return Err(Error::Shape(format!(
            "frame size {}x{} is not a multiple of {m}",
            clip.height(),
            clip.width()
        )));
    }
    Ok(())
}

/// Runs the network and keeps every activation needed by the backward pass.
pub fn trace(params: &SsfcnParams, clip: &VideoClip) -> Result<SsfcnTrace> {
    check_clip(params, clip)?;
    let mut x = Tensor {
        c: clip.channels(),
        t: clip.t_len(),
        h: clip.height(),
        w: clip.width(),
        data: clip.data().to_vec(),
    };
    let mut encoder = Vec::with_capacity(params.encoder.len());
    for block in &params.encoder {
        let (unit1, a1) = unit_forward(x, &block.conv1);
        let (r1, norm1) = norm_relu(&a1, &block.norm1);
        let (unit2, a2) = unit_forward(r1, &block.conv2);
        let (relu2, norm2) = norm_relu(&a2, &block.norm2);
        let (pooled, pool_idx) = maxpool_forward(&relu2);
        encoder.push(EncoderTrace {
            unit1,
            norm1,
            unit2,
            norm2,
            relu2,
            pool_idx,
        });
        x = pooled;
    }

    let plane = x.h * x.w;
    let mut bridged = Tensor::zeros(x.c, 1, x.h, x.w);
    let mut bridge_idx = Vec::new();
    for c in 0..x.c {
        for p in 0..plane {
            let at = |t: usize| (c * x.t + t) * plane + p;
            bridged.data[c * plane + p] = match params.config.bridge {
                Bridge::Mean => (0..x.t).map(|t| x.data[at(t)]).sum::<f64>() / x.t as f64,
                Bridge::Max => {
                    let best =
                        (1..x.t).fold(
                            at(0),
                            |b, t| if x.data[at(t)] > x.data[b] { at(t) } else { b },
                        );
                    bridge_idx.push(best);
                    x.data[best]
                }
            };
        }
    }
    let encoded = x;

    let mut x = bridged;
    let mut decoder = Vec::with_capacity(params.decoder.len());
    for block in &params.decoder {
        let up = upsample_forward(&x);
        let a = conv_forward(
            &up,
            block.conv.out_channels,
            block.conv.kernel,
            &block.conv.weight,
            &[],
        );
        let (relu, norm) = norm_relu(&a, &block.norm);
        let mut out = relu.clone();
        match &block.projection {
            Some(p) => {
                let skip = conv_forward(&up, p.out_channels, p.kernel, &p.weight, &[]);
                crate::nn::axpy(&mut out.data, 1.0, &skip.data);
            }
            None => crate::nn::axpy(&mut out.data, 1.0, &up.data),
        }
        decoder.push(DecoderTrace { up, norm, relu });
        x = out;
    }
    let head = &params.head;
    let logits = conv_forward(&x, 1, head.kernel, &head.weight, &head.bias).data;
    Ok(SsfcnTrace {
        encoder,
        encoded,
        bridge_idx,
        decoder,
        head_input: x,
        logits,
        frame_ms: clip.frame_ms(clip.t_len() - 1),
    })
}

/// Predicted saliency for the last frame of the clip.
pub fn ssfcn_forward(params: &SsfcnParams, clip: &VideoClip) -> Result<SaliencyMap> {
    Ok(trace(params, clip)?.map())
}

/// Mean per-pixel binary cross-entropy of `sigmoid(logits)` against `target`,
/// computed as `softplus(z) - y z`.
pub fn bce_loss(logits: &[f64], target: &[f64]) -> f64 {
    let sum: f64 = logits
        .iter()
        .zip(target)
        .map(|(&z, &y)| softplus(z) - y * z)
        .sum();
    sum / logits.len() as f64
}

fn unit_backward(
    inputs: &[Tensor],
    convs: &[Conv],
    gconvs: &mut [Conv],
    g: Tensor,
    need_input: bool,
) -> Option<Tensor> {
    let mut g = g;
    for (i, ((x, c), gc)) in inputs
        .iter()
        .zip(convs)
        .zip(gconvs.iter_mut())
        .enumerate()
        .rev()
    {
        let need = need_input || i > 0;
        {
            let gx = conv_backward(
                x,
                c.kernel,
                &c.weight,
                &g,
                &mut gc.weight,
                &mut gc.bias,
                need,
            )?;
            g = gx
        }
    }
    Some(g)
}

/// Loss and its gradient with respect to every parameter.
pub fn ssfcn_loss_and_grad(
    params: &SsfcnParams,
    clip: &VideoClip,
    target: &SaliencyMap,
) -> Result<(f64, SsfcnParams)> {
    let tr = trace(params, clip)?;
    let (h, w) = tr.output_shape();
    if !target.same_shape(h, w) {
        return Err(Error::Shape(format!(
            "target is {}x{}, prediction is {h}x{w}",
            target.height(),
            target.width()
        )));
    }
    let loss = bce_loss(&tr.logits, target.values());
    let p = tr.logits.len() as f64;
    let mut grads = SsfcnParams::zeros(&params.config)?;

    let mut g = Tensor {
        c: 1,
        t: 1,
        h,
        w,
        data: tr
            .logits
            .iter()
            .zip(target.values())
            .map(|(&z, &y)| (sigmoid(z) - y) / p)
            .collect(),
    };
    let head = &params.head;
    let gh = &mut grads.head;
    g = conv_backward(
        &tr.head_input,
        head.kernel,
        &head.weight,
        &g,
        &mut gh.weight,
        &mut gh.bias,
        true,
    )
    .expect("input gradient requested");

    for ((block, gblock), dt) in params
        .decoder
        .iter()
        .zip(&mut grads.decoder)
        .zip(&tr.decoder)
        .rev()
    {
        let mut gup = match (&block.projection, &mut gblock.projection) {
            (Some(p), Some(gp)) => conv_backward(
                &dt.up,
                p.kernel,
                &p.weight,
                &g,
                &mut gp.weight,
                &mut gp.bias,
                true,
            )
            .expect("input gradient requested"),
            _ => g.clone(),
        };
        let mut gr = g;
        relu_mask(&mut gr, &dt.relu);
        let ga = norm_backward(
            &gr,
            &dt.norm,
            &block.norm.scale,
            &mut gblock.norm.scale,
            &mut gblock.norm.shift,
        );
        let c = &block.conv;
        let gc = &mut gblock.conv;
        let gconv = conv_backward(
            &dt.up,
            c.kernel,
            &c.weight,
            &ga,
            &mut gc.weight,
            &mut gc.bias,
            true,
        )
        .expect("input gradient requested");
        crate::nn::axpy(&mut gup.data, 1.0, &gconv.data);
        g = upsample_backward(&gup);
    }

    let enc = &tr.encoded;
    let plane = enc.h * enc.w;
    let mut genc = enc.same_shape();
    for c in 0..enc.c {
        for p in 0..plane {
            let gv = g.data[c * plane + p];
            match params.config.bridge {
                Bridge::Mean => {
                    for t in 0..enc.t {
                        genc.data[(c * enc.t + t) * plane + p] = gv / enc.t as f64;
                    }
                }
                Bridge::Max => genc.data[tr.bridge_idx[c * plane + p]] += gv,
            }
        }
    }

    let mut g = genc;
    for (b, ((block, gblock), et)) in params
        .encoder
        .iter()
        .zip(&mut grads.encoder)
        .zip(&tr.encoder)
        .enumerate()
        .rev()
    {
        let mut gr2 = maxpool_backward(&g, &et.pool_idx, &et.relu2);
        relu_mask(&mut gr2, &et.relu2);
        let ga2 = norm_backward(
            &gr2,
            &et.norm2,
            &block.norm2.scale,
            &mut gblock.norm2.scale,
            &mut gblock.norm2.shift,
        );
        let mut gr1 = unit_backward(&et.unit2, &block.conv2, &mut gblock.conv2, ga2, true)
            .expect("input gradient requested");
        relu_mask(&mut gr1, &et.unit2[0]);
        let ga1 = norm_backward(
            &gr1,
            &et.norm1,
            &block.norm1.scale,
            &mut gblock.norm1.scale,
            &mut gblock.norm1.shift,
        );
        match unit_backward(&et.unit1, &block.conv1, &mut gblock.conv1, ga1, b > 0) {
            Some(gx) => g = gx,
            None => break,
        }
    }
    Ok((loss, grads))
}
