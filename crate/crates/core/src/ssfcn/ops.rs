//! Dense tensor kernels for the saliency network. Tensors are `C x T x H x W`
//! and contiguous; 2D stages use `T = 1`.

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub c: usize,
    pub t: usize,
    pub h: usize,
    pub w: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(c: usize, t: usize, h: usize, w: usize) -> Self {
        Self {
            c,
            t,
            h,
            w,
            data: vec![0.0; c * t * h * w],
        }
    }

    pub fn plane(&self) -> usize {
        self.t * self.h * self.w
    }

    pub fn same_shape(&self) -> Self {
        Self::zeros(self.c, self.t, self.h, self.w)
    }
}

/// `c = a * b + beta * c` for row-major `c` (`m x n`); `a` and `b` are read
/// through the given row and column strides.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    (rsa, csa): (usize, usize),
    b: &[f64],
    (rsb, csb): (usize, usize),
    beta: f64,
    c: &mut [f64],
) {
    if m == 0 || n == 0 {
        return;
    }
    assert!(k == 0 || (m - 1) * rsa + (k - 1) * csa < a.len());
    assert!(k == 0 || (k - 1) * rsb + (n - 1) * csb < b.len());
    assert!(c.len() >= m * n);
    // SAFETY: the asserts above keep every strided access inside the slices.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// Valid output x range for a kernel tap `d` with padding `p` on a row of `w`.
fn x_range(d: usize, p: usize, w: usize) -> (usize, usize) {
    let lo = p.saturating_sub(d);
    let hi = (w + p).saturating_sub(d).min(w);
    (lo, hi.max(lo))
}

fn shifted(i: usize, d: usize, p: usize, len: usize) -> Option<usize> {
    let s = (i + d).checked_sub(p)?;
    (s < len).then_some(s)
}

/// Unfolds `x` for a `kernel` convolution with same padding: row
/// `((ci * kt + dt) * kh + dy) * kw + dx`, one column per output position.
fn im2col(x: &Tensor, kernel: [usize; 3]) -> Vec<f64> {
    let [kt, kh, kw] = kernel;
    let (pt, ph, pw) = (kt / 2, kh / 2, kw / 2);
    let n = x.plane();
    let mut col = vec![0.0; x.c * kt * kh * kw * n];
    let mut rows = col.chunks_exact_mut(n);
    for ci in 0..x.c {
        for dt in 0..kt {
            for dy in 0..kh {
                for dx in 0..kw {
                    let row = rows.next().expect("row count");
                    let (x0, x1) = x_range(dx, pw, x.w);
                    for t in 0..x.t {
                        let Some(st) = shifted(t, dt, pt, x.t) else {
                            continue;
                        };
                        for y in 0..x.h {
                            let Some(sy) = shifted(y, dy, ph, x.h) else {
                                continue;
                            };
                            let dst = (t * x.h + y) * x.w;
                            let src = ((ci * x.t + st) * x.h + sy) * x.w + x0 + dx - pw;
                            row[dst + x0..dst + x1].copy_from_slice(&x.data[src..src + x1 - x0]);
                        }
                    }
                }
            }
        }
    }
    col
}

/// Adjoint of [`im2col`]: accumulates columns back into `gx`.
fn col2im(col: &[f64], kernel: [usize; 3], gx: &mut Tensor) {
    let [kt, kh, kw] = kernel;
    let (pt, ph, pw) = (kt / 2, kh / 2, kw / 2);
    let n = gx.plane();
    let mut rows = col.chunks_exact(n);
    for ci in 0..gx.c {
        for dt in 0..kt {
            for dy in 0..kh {
                for dx in 0..kw {
                    let row = rows.next().expect("row count");
                    let (x0, x1) = x_range(dx, pw, gx.w);
                    for t in 0..gx.t {
                        let Some(st) = shifted(t, dt, pt, gx.t) else {
                            continue;
                        };
                        for y in 0..gx.h {
                            let Some(sy) = shifted(y, dy, ph, gx.h) else {
                                continue;
                            };
                            let src = (t * gx.h + y) * gx.w;
                            let dst = ((ci * gx.t + st) * gx.h + sy) * gx.w + x0 + dx - pw;
                            for (g, v) in gx.data[dst..dst + x1 - x0]
                                .iter_mut()
                                .zip(&row[src + x0..src + x1])
                            {
                                *g += v;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Same-padded convolution. `weight` is `out x in x kt x kh x kw`; `bias`
/// is either empty or one value per output channel.
pub fn conv_forward(
    x: &Tensor,
    out_channels: usize,
    kernel: [usize; 3],
    weight: &[f64],
    bias: &[f64],
) -> Tensor {
    let k = x.c * kernel.iter().product::<usize>();
    let n = x.plane();
    let mut out = Tensor::zeros(out_channels, x.t, x.h, x.w);
    if kernel == [1, 1, 1] {
        gemm(
            out_channels,
            k,
            n,
            weight,
            (k, 1),
            &x.data,
            (n, 1),
            0.0,
            &mut out.data,
        );
    } else {
        let col = im2col(x, kernel);
        gemm(
            out_channels,
            k,
            n,
            weight,
            (k, 1),
            &col,
            (n, 1),
            0.0,
            &mut out.data,
        );
    }
    if !bias.is_empty() {
        for (row, b) in out.data.chunks_exact_mut(n).zip(bias) {
            row.iter_mut().for_each(|v| *v += b);
        }
    }
    out
}

/// Accumulates weight and bias gradients and returns the input gradient when
/// `need_input` is set.
#[allow(clippy::too_many_arguments)]
pub fn conv_backward(
    x: &Tensor,
    kernel: [usize; 3],
    weight: &[f64],
    gout: &Tensor,
    gweight: &mut [f64],
    gbias: &mut [f64],
    need_input: bool,
) -> Option<Tensor> {
    let co = gout.c;
    let k = x.c * kernel.iter().product::<usize>();
    let n = x.plane();
    let pointwise = kernel == [1, 1, 1];
    let col_owned;
    let col: &[f64] = if pointwise {
        &x.data
    } else {
        col_owned = im2col(x, kernel);
        &col_owned
    };
    gemm(co, n, k, &gout.data, (n, 1), col, (1, n), 1.0, gweight);
    for (g, row) in gbias.iter_mut().zip(gout.data.chunks_exact(n)) {
        *g += row.iter().sum::<f64>();
    }
    if !need_input {
        return None;
    }
    let mut gx = x.same_shape();
    if pointwise {
        gemm(
            k,
            co,
            n,
            weight,
            (1, k),
            &gout.data,
            (n, 1),
            0.0,
            &mut gx.data,
        );
    } else {
        let mut gcol = vec![0.0; k * n];
        gemm(k, co, n, weight, (1, k), &gout.data, (n, 1), 0.0, &mut gcol);
        col2im(&gcol, kernel, &mut gx);
    }
    Some(gx)
}

pub const NORM_EPS: f64 = 1e-5;

#[derive(Debug, Clone)]
pub struct NormCache {
    xhat: Tensor,
    inv_std: Vec<f64>,
}

/// Per-channel standardization over every position of the channel, then
/// `scale * xhat + shift`.
pub fn norm_forward(x: &Tensor, scale: &[f64], shift: &[f64]) -> (Tensor, NormCache) {
    let n = x.plane();
    let mut xhat = x.clone();
    let mut y = x.same_shape();
    let mut inv_std = Vec::with_capacity(x.c);
    for (ci, (xh, yc)) in xhat
        .data
        .chunks_exact_mut(n)
        .zip(y.data.chunks_exact_mut(n))
        .enumerate()
    {
        let mean = xh.iter().sum::<f64>() / n as f64;
        let var = xh.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let inv = 1.0 / (var + NORM_EPS).sqrt();
        for (h, o) in xh.iter_mut().zip(yc.iter_mut()) {
            *h = (*h - mean) * inv;
            *o = scale[ci] * *h + shift[ci];
        }
        inv_std.push(inv);
    }
    (y, NormCache { xhat, inv_std })
}

pub fn norm_backward(
    gy: &Tensor,
    cache: &NormCache,
    scale: &[f64],
    gscale: &mut [f64],
    gshift: &mut [f64],
) -> Tensor {
    let n = gy.plane();
    let nf = n as f64;
    let mut gx = gy.same_shape();
    for (ci, ((g, h), out)) in gy
        .data
        .chunks_exact(n)
        .zip(cache.xhat.data.chunks_exact(n))
        .zip(gx.data.chunks_exact_mut(n))
        .enumerate()
    {
        let sum_g: f64 = g.iter().sum();
        let sum_gh: f64 = g.iter().zip(h).map(|(a, b)| a * b).sum();
        gscale[ci] += sum_gh;
        gshift[ci] += sum_g;
        let k = scale[ci] * cache.inv_std[ci] / nf;
        for ((o, &gi), &hi) in out.iter_mut().zip(g).zip(h) {
            *o = k * (nf * gi - sum_g - hi * sum_gh);
        }
    }
    gx
}

pub fn relu_in_place(x: &mut Tensor) {
    x.data.iter_mut().for_each(|v| *v = v.max(0.0));
}

/// Zeroes gradient entries where the ReLU output was not positive.
pub fn relu_mask(g: &mut Tensor, out: &Tensor) {
    for (gi, &o) in g.data.iter_mut().zip(&out.data) {
        if o <= 0.0 {
            *gi = 0.0;
        }
    }
}

/// 1 x 2 x 2 max pooling; returns the flat input index of every maximum
/// (first one on ties).
pub fn maxpool_forward(x: &Tensor) -> (Tensor, Vec<usize>) {
    let (h2, w2) = (x.h / 2, x.w / 2);
    let mut out = Tensor::zeros(x.c, x.t, h2, w2);
    let mut idx = Vec::with_capacity(out.data.len());
    for ct in 0..x.c * x.t {
        for y in 0..h2 {
            for xx in 0..w2 {
                let base = (ct * x.h + 2 * y) * x.w + 2 * xx;
                let mut best = base;
                for cand in [base + 1, base + x.w, base + x.w + 1] {
                    if x.data[cand] > x.data[best] {
                        best = cand;
                    }
                }
                out.data[(ct * h2 + y) * w2 + xx] = x.data[best];
                idx.push(best);
            }
        }
    }
    (out, idx)
}

pub fn maxpool_backward(gout: &Tensor, idx: &[usize], input: &Tensor) -> Tensor {
    let mut gx = input.same_shape();
    for (&g, &i) in gout.data.iter().zip(idx) {
        gx.data[i] += g;
    }
    gx
}

/// Nearest-neighbour 2x spatial upsampling.
pub fn upsample_forward(x: &Tensor) -> Tensor {
    let mut out = Tensor::zeros(x.c, x.t, 2 * x.h, 2 * x.w);
    let w2 = 2 * x.w;
    for ct in 0..x.c * x.t {
        for y in 0..2 * x.h {
            let src = &x.data[(ct * x.h + y / 2) * x.w..][..x.w];
            let dst = &mut out.data[(ct * 2 * x.h + y) * w2..][..w2];
            for (xx, v) in dst.iter_mut().enumerate() {
                *v = src[xx / 2];
            }
        }
    }
    out
}

pub fn upsample_backward(gout: &Tensor) -> Tensor {
    let mut gx = Tensor::zeros(gout.c, gout.t, gout.h / 2, gout.w / 2);
    for ct in 0..gout.c * gout.t {
        for y in 0..gout.h {
            let src = &gout.data[(ct * gout.h + y) * gout.w..][..gout.w];
            let dst = &mut gx.data[(ct * gx.h + y / 2) * gx.w..][..gx.w];
            for (xx, v) in src.iter().enumerate() {
                dst[xx / 2] += v;
            }
        }
    }
    gx
}
