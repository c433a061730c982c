//! Moving Gaussian blob clips.
//!
//! The background is a fixed per-clip texture of uniform noise scaled to
//! `[0, 0.3]`; the blob adds `exp(-r^2 / 2 sigma^2)` on top, clamped to 1. The
//! ground-truth density of a frame is the blob profile alone, so its peak is 1.
//! With `flatness = p > 1` the profile is `exp(-(r^2 / 2 sigma^2)^p)`, a
//! flat-topped blob that can cover a large share of the frame.

use rand::Rng;

use crate::saliency::{FixationMap, SaliencyMap};
use crate::seed::{derive_indexed, rng};
use crate::ssfcn::VideoClip;
use crate::{Error, Result};

const BACKGROUND: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlobMotion {
    Static,
    /// Constant velocity, up to 1.5 px per frame on each axis.
    Drift,
    /// Alternates between the top-left and bottom-right quarter points.
    Jump,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClipSpec {
    pub t_len: usize,
    pub height: usize,
    pub width: usize,
    pub sigma: f64,
    /// 1 for a Gaussian profile, higher for flatter tops.
    pub flatness: u32,
    pub motion: BlobMotion,
    pub frame_rate_fps: f64,
    pub fixations: usize,
}

impl Default for ClipSpec {
    fn default() -> Self {
        Self {
            t_len: 8,
            height: 64,
            width: 64,
            sigma: 3.0,
            flatness: 1,
            motion: BlobMotion::Drift,
            frame_rate_fps: 10.0,
            fixations: 16,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticClip {
    pub clip: VideoClip,
    /// Density of the last frame, the network's target.
    pub truth: SaliencyMap,
    /// Density of every frame.
    pub frame_truth: Vec<SaliencyMap>,
    /// Fixations of the last frame.
    pub fixations: FixationMap,
    /// Fixations of every frame, drawn from that frame's density.
    pub frame_fixations: Vec<FixationMap>,
}

pub fn gen_synthetic_clips(n: usize, seed: u64) -> Result<Vec<SyntheticClip>> {
    gen_synthetic_clips_with(n, seed, &ClipSpec::default())
}

pub fn gen_synthetic_clips_with(
    n: usize,
    seed: u64,
    spec: &ClipSpec,
) -> Result<Vec<SyntheticClip>> {
    if spec.t_len == 0 || spec.height < 4 || spec.width < 4 {
        return Err(Error::InvalidArgument("clip dimensions too small".into()));
    }
    if spec.flatness == 0 {
        return Err(Error::InvalidArgument(
            "blob flatness must be at least 1".into(),
        ));
    }
    if !(spec.sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "blob sigma must be positive, got {}",
            spec.sigma
        )));
    }
    (0..n)
        .map(|i| one_clip(derive_indexed(seed, "synth.clip", i as u64), spec))
        .collect()
}

fn blob(spec: &ClipSpec, cy: f64, cx: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(spec.height * spec.width);
    let k = 0.5 / (spec.sigma * spec.sigma);
    for y in 0..spec.height {
        for x in 0..spec.width {
            let r2 = (y as f64 - cy).powi(2) + (x as f64 - cx).powi(2);
            v.push((-(k * r2).powi(spec.flatness as i32)).exp());
        }
    }
    v
}

fn one_clip(seed: u64, spec: &ClipSpec) -> Result<SyntheticClip> {
    let mut r = rng(seed);
    let (h, w) = (spec.height as f64, spec.width as f64);
    let texture: Vec<f64> = (0..spec.height * spec.width)
        .map(|_| BACKGROUND * r.gen::<f64>())
        .collect();
    let margin = (h.min(w) / 8.0).max(1.0);
    let cy = margin + r.gen::<f64>() * (h - 2.0 * margin);
    let cx = margin + r.gen::<f64>() * (w - 2.0 * margin);
    let (vy, vx) = (3.0 * (r.gen::<f64>() - 0.5), 3.0 * (r.gen::<f64>() - 0.5));

    let mut data = Vec::with_capacity(spec.t_len * texture.len());
    let mut frame_truth = Vec::with_capacity(spec.t_len);
    for t in 0..spec.t_len {
        let (py, px) = match spec.motion {
            BlobMotion::Static => (cy, cx),
            BlobMotion::Drift => (
                (cy + vy * t as f64).clamp(0.0, h - 1.0),
                (cx + vx * t as f64).clamp(0.0, w - 1.0),
            ),
            BlobMotion::Jump if t % 2 == 0 => (h / 4.0, w / 4.0),
            BlobMotion::Jump => (3.0 * h / 4.0, 3.0 * w / 4.0),
        };
        let density = blob(spec, py, px);
        data.extend(texture.iter().zip(&density).map(|(b, d)| (b + d).min(1.0)));
        let frame_ms = (t as f64 * 1000.0 / spec.frame_rate_fps).round() as i64;
        frame_truth.push(SaliencyMap::new(
            spec.height,
            spec.width,
            density,
            frame_ms,
        )?);
    }
    let truth = frame_truth.last().expect("t_len >= 1").clone();
    let frame_fixations = frame_truth
        .iter()
        .map(|m| sample_fixations(m, spec.fixations, &mut r))
        .collect::<Result<Vec<_>>>()?;
    let fixations = frame_fixations.last().expect("t_len >= 1").clone();
    let clip = VideoClip::new(
        spec.t_len,
        spec.height,
        spec.width,
        1,
        data,
        spec.frame_rate_fps,
        0,
    )?;
    Ok(SyntheticClip {
        clip,
        truth,
        frame_truth,
        fixations,
        frame_fixations,
    })
}

/// Draws pixels with probability proportional to the density.
fn sample_fixations(density: &SaliencyMap, k: usize, r: &mut impl Rng) -> Result<FixationMap> {
    let mut cumulative = Vec::with_capacity(density.values().len());
    let mut total = 0.0;
    for &v in density.values() {
        total += v;
        cumulative.push(total);
    }
    let w = density.width();
    let points: Vec<(usize, usize)> = (0..k)
        .map(|_| {
            let u = r.gen::<f64>() * total;
            let i = cumulative
                .partition_point(|&c| c <= u)
                .min(cumulative.len() - 1);
            (i / w, i % w)
        })
        .collect();
    FixationMap::from_points(density.height(), w, &points)
}
