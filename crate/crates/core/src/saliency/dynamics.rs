use super::SaliencyMap;
use crate::{Error, Result};

/// Normalized temporal change of the saliency stream over one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneDynamics {
    pub gradient: f64,
    pub window_start_ms: i64,
}

impl SceneDynamics {
    pub fn new(gradient: f64, window_start_ms: i64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gradient) {
            return Err(Error::InvalidArgument(format!(
                "scene gradient must be in [0, 1], got {gradient}"
            )));
        }
        Ok(Self {
            gradient,
            window_start_ms,
        })
    }
}

/// Mean over consecutive pairs of the mean absolute pixel difference. Maps
/// live in `[0, 1]`, so the result does too.
pub fn scene_dynamics(maps: &[SaliencyMap]) -> Result<SceneDynamics> {
    if maps.len() < 2 {
        return Err(Error::InvalidArgument(
            "scene dynamics needs at least 2 maps".into(),
        ));
    }
    let first = &maps[0];
    let (h, w) = (first.height(), first.width());
    if let Some(m) = maps.iter().find(|m| !m.same_shape(h, w)) {
        return Err(Error::Shape(format!(
            "map of {} x {} in a {h} x {w} sequence",
            m.height(),
            m.width()
        )));
    }
    let pixels = (h * w) as f64;
    let total: f64 = maps
        .windows(2)
        .map(|pair| {
            pair[0]
                .values()
                .iter()
                .zip(pair[1].values())
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>()
                / pixels
        })
        .sum();
    let gradient = (total / (maps.len() - 1) as f64).clamp(0.0, 1.0);
    SceneDynamics::new(gradient, first.frame_ms)
}
