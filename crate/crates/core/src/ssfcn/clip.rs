use crate::{Error, Result};

/// A short stack of frames, stored channel-major: index
/// `((c * t_len + t) * height + y) * width + x`.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoClip {
    t_len: usize,
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
    pub frame_rate_fps: f64,
    pub clip_start_ms: i64,
}

impl VideoClip {
    pub fn new(
        t_len: usize,
        height: usize,
        width: usize,
        channels: usize,
        data: Vec<f64>,
        frame_rate_fps: f64,
        clip_start_ms: i64,
    ) -> Result<Self> {
        if t_len == 0 || height == 0 || width == 0 {
            return Err(Error::Shape(format!("empty clip {t_len}x{height}x{width}")));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::Shape(format!(
                "clips have 1 or 3 channels, got {channels}"
            )));
        }
        if data.len() != t_len * height * width * channels {
            return Err(Error::Shape(format!(
                "clip data holds {} values, expected {}",
                data.len(),
                t_len * height * width * channels
            )));
        }
        if let Some(i) = data.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument(format!(
                "clip value {} at {i} is outside [0, 1]",
                data[i]
            )));
        }
        if !(frame_rate_fps.is_finite() && frame_rate_fps > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "frame rate must be positive, got {frame_rate_fps}"
            )));
        }
        Ok(Self {
            t_len,
            height,
            width,
            channels,
            data,
            frame_rate_fps,
            clip_start_ms,
        })
    }

    pub fn t_len(&self) -> usize {
        self.t_len
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, t: usize, y: usize, x: usize, c: usize) -> f64 {
        self.data[((c * self.t_len + t) * self.height + y) * self.width + x]
    }

    /// Timestamp of frame `t`, rounded to the millisecond.
    pub fn frame_ms(&self, t: usize) -> i64 {
        self.clip_start_ms + (t as f64 * 1000.0 / self.frame_rate_fps).round() as i64
    }
}
