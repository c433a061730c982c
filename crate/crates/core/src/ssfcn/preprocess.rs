use super::VideoClip;
use crate::io::Image;
use crate::{Error, Result};

/// Scales 8-bit frames to `[0, 1]`, center-crops or zero-pads each frame to
/// the nearest multiple of `multiple` (rounding down, at least one multiple),
/// and cuts clips of `clip_len` frames with hop `clip_len / 2` (at least 1).
/// `names` label the frames in error messages.
pub fn preprocess_clip(
    frames: &[Image],
    names: &[String],
    clip_len: usize,
    multiple: usize,
    frame_rate_fps: f64,
    start_ms: i64,
) -> Result<Vec<VideoClip>> {
    let name = |i: usize| {
        names
            .get(i)
            .cloned()
            .unwrap_or_else(|| format!("frame {i}"))
    };
    let Some(first) = frames.first() else {
        return Err(Error::ingest(name(0), 0, "no frames"));
    };
    if clip_len == 0 || multiple == 0 {
        return Err(Error::InvalidArgument(
            "clip_len and multiple must be positive".into(),
        ));
    }
    for (i, f) in frames.iter().enumerate() {
        if (f.width, f.height, f.channels) != (first.width, first.height, first.channels) {
            return Err(Error::ingest(
                name(i),
                0,
                format!(
                    "frame is {}x{}x{}, first frame is {}x{}x{}",
                    f.width, f.height, f.channels, first.width, first.height, first.channels
                ),
            ));
        }
    }
    if frames.len() < clip_len {
        return Err(Error::ingest(
            name(frames.len() - 1),
            0,
            format!("{} frames, clips need {clip_len}", frames.len()),
        ));
    }
    let fit = |n: usize| (n / multiple).max(1) * multiple;
    let (h, w, c) = (fit(first.height), fit(first.width), first.channels);
    // offset of the source window; negative means padding
    let oy = (first.height as isize - h as isize) / 2;
    let ox = (first.width as isize - w as isize) / 2;
    let plane = h * w;
    let scaled: Vec<Vec<f64>> = frames
        .iter()
        .map(|f| {
            let mut out = vec![0.0; c * plane];
            for y in 0..h {
                let sy = y as isize + oy;
                if sy < 0 || sy >= f.height as isize {
                    continue;
                }
                for x in 0..w {
                    let sx = x as isize + ox;
                    if sx < 0 || sx >= f.width as isize {
                        continue;
                    }
                    let src = (sy as usize * f.width + sx as usize) * c;
                    for ch in 0..c {
                        out[ch * plane + y * w + x] = f64::from(f.data[src + ch]) / 255.0;
                    }
                }
            }
            out
        })
        .collect();

    let hop = (clip_len / 2).max(1);
    let mut clips = Vec::new();
    let mut s = 0;
    while s + clip_len <= frames.len() {
        let mut data = Vec::with_capacity(c * clip_len * plane);
        for ch in 0..c {
            for f in &scaled[s..s + clip_len] {
                data.extend_from_slice(&f[ch * plane..(ch + 1) * plane]);
            }
        }
        let clip_start = start_ms + (s as f64 * 1000.0 / frame_rate_fps).round() as i64;
        clips.push(VideoClip::new(
            clip_len,
            h,
            w,
            c,
            data,
            frame_rate_fps,
            clip_start,
        )?);
        s += hop;
    }
    Ok(clips)
}

/// [`preprocess_clip`] with default frame names.
pub fn frames_to_clips(
    frames: &[Image],
    clip_len: usize,
    multiple: usize,
    frame_rate_fps: f64,
) -> Result<Vec<VideoClip>> {
    preprocess_clip(frames, &[], clip_len, multiple, frame_rate_fps, 0)
}
