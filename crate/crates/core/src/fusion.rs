//! The driver attention analyzer: compares the attention the driver shows
//! with the attention the scene demands.
//!
//! | attention   | scene   | alert |
//! |-------------|---------|-------|
//! | medium-low  | static  | no    |
//! | medium-low  | dynamic | yes   |
//! | high        | static  | no    |
//! | high        | dynamic | no    |

use std::fmt::Write as _;
use std::path::Path;

use crate::saliency::SceneDynamics;
use crate::tcn::AttentionScore;
use crate::{Error, Result};

pub const ALERT_REASON: &str = "attention below scenario requirement";

#[derive(Debug, Clone, PartialEq)]
pub struct FusionConfig {
    /// Scene gradient above which the scene is dynamic.
    pub theta: f64,
    /// Lowest score counted as high attention.
    pub attention_high_min: f64,
    /// Consecutive alerting windows needed before an event is emitted.
    pub debounce_windows: usize,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            theta: 0.45,
            attention_high_min: 0.61,
            debounce_windows: 1,
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "theta must be in (0, 1), got {}",
                self.theta
            )));
        }
        if !(self.attention_high_min > 0.0 && self.attention_high_min <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "attention_high_min must be in (0, 1], got {}",
                self.attention_high_min
            )));
        }
        if self.debounce_windows == 0 {
            return Err(Error::InvalidArgument(
                "debounce_windows must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttentionClass {
    MediumLow,
    High,
}

impl AttentionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            AttentionClass::MediumLow => "medium_low",
            AttentionClass::High => "high",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneClass {
    Static,
    Dynamic,
}

impl SceneClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SceneClass::Static => "static",
            SceneClass::Dynamic => "dynamic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionDecision {
    pub window_start_ms: i64,
    pub score: f64,
    pub gradient: f64,
    pub attention_class: AttentionClass,
    pub scene_class: SceneClass,
    pub alert: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlertEvent {
    pub window_start_ms: i64,
    pub score: f64,
    pub gradient: f64,
    pub reason: &'static str,
}

/// Scores below `attention_high_min` are medium-low. With the default 0.61
/// this puts 0.6 in medium-low and the unlisted gap (0.6, 0.61) there too.
pub fn classify_attention(score: &AttentionScore, cfg: &FusionConfig) -> Result<AttentionClass> {
    if !(0.0..=1.0).contains(&score.value) {
        return Err(Error::InvalidArgument(format!(
            "attention score must be in [0, 1], got {}",
            score.value
        )));
    }
    Ok(if score.value >= cfg.attention_high_min {
        AttentionClass::High
    } else {
        AttentionClass::MediumLow
    })
}

/// Dynamic only when strictly above `theta`.
pub fn classify_scene(dynamics: &SceneDynamics, cfg: &FusionConfig) -> SceneClass {
    if dynamics.gradient > cfg.theta {
        SceneClass::Dynamic
    } else {
        SceneClass::Static
    }
}

pub fn decide(
    score: &AttentionScore,
    dynamics: &SceneDynamics,
    cfg: &FusionConfig,
) -> Result<FusionDecision> {
    let attention_class = classify_attention(score, cfg)?;
    let scene_class = classify_scene(dynamics, cfg);
    Ok(FusionDecision {
        window_start_ms: score.window_start_ms,
        score: score.value,
        gradient: dynamics.gradient,
        attention_class,
        scene_class,
        alert: scene_class == SceneClass::Dynamic && attention_class == AttentionClass::MediumLow,
    })
}

/// One decision per pair; an event once the current run of alerting
/// decisions reaches `debounce_windows`, and again for every further
/// alerting window of the same run.
pub fn stream_decide(
    pairs: &[(AttentionScore, SceneDynamics)],
    cfg: &FusionConfig,
) -> Result<(Vec<FusionDecision>, Vec<AlertEvent>)> {
    cfg.validate()?;
    let mut decisions = Vec::with_capacity(pairs.len());
    let mut events = Vec::new();
    let mut run = 0usize;
    let mut last_ms: Option<i64> = None;
    for (score, dynamics) in pairs {
        if score.window_start_ms != dynamics.window_start_ms {
            return Err(Error::Alignment(format!(
                "score at {} ms paired with scene window at {} ms",
                score.window_start_ms, dynamics.window_start_ms
            )));
        }
        if let Some(prev) = last_ms {
            if score.window_start_ms <= prev {
                return Err(Error::Alignment(format!(
                    "window at {} ms does not follow {prev} ms",
                    score.window_start_ms
                )));
            }
        }
        last_ms = Some(score.window_start_ms);
        let d = decide(score, dynamics, cfg)?;
        run = if d.alert { run + 1 } else { 0 };
        if run >= cfg.debounce_windows {
            events.push(AlertEvent {
                window_start_ms: d.window_start_ms,
                score: d.score,
                gradient: d.gradient,
                reason: ALERT_REASON,
            });
        }
        decisions.push(d);
    }
    Ok((decisions, events))
}

/// JSON-lines alert log, one object per decision, fixed key order and six
/// decimal digits.
pub fn format_alert_log(decisions: &[FusionDecision]) -> String {
    let mut s = String::new();
    for d in decisions {
        let _ = writeln!(
            s,
            "{{\"t_ms\":{},\"score\":{:.6},\"gradient\":{:.6},\"attention\":\"{}\",\"scene\":\"{}\",\"alert\":{}}}",
            d.window_start_ms,
            d.score,
            d.gradient,
            d.attention_class.as_str(),
            d.scene_class.as_str(),
            d.alert
        );
    }
    s
}

pub fn write_alert_log(path: &Path, decisions: &[FusionDecision]) -> Result<()> {
    crate::io::write_text(path, &format_alert_log(decisions))
}

/// A replayed window with the verdict a reviewer assigned to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledWindow {
    pub score: f64,
    pub gradient: f64,
    pub alert_expected: bool,
}

/// Best thresholds found by [`calibrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub theta: f64,
    pub attention_high_min: f64,
    pub accuracy: f64,
}

/// Grid search over `(theta, attention_high_min)` in steps of 0.01 on
/// `(0, 1)` and `(0, 1]`, maximizing per-window alert accuracy. Ties go to
/// the candidate closest to `base` (Euclidean), then to the first one
/// visited.
pub fn calibrate(windows: &[LabeledWindow], base: &FusionConfig) -> Result<Calibration> {
    if windows.is_empty() {
        return Err(Error::InvalidDataset(
            "calibration needs at least one labeled window".into(),
        ));
    }
    let mut best: Option<(Calibration, f64)> = None;
    for ti in 1..100 {
        let theta = f64::from(ti) / 100.0;
        for ai in 1..=100 {
            let attention_high_min = f64::from(ai) / 100.0;
            let correct = windows
                .iter()
                .filter(|w| {
                    let alert = w.gradient > theta && w.score < attention_high_min;
                    alert == w.alert_expected
                })
                .count();
            let accuracy = correct as f64 / windows.len() as f64;
            let distance = (theta - base.theta).hypot(attention_high_min - base.attention_high_min);
            let better = match &best {
                None => true,
                Some((b, d)) => accuracy > b.accuracy || (accuracy == b.accuracy && distance < *d),
            };
            if better {
                best = Some((
                    Calibration {
                        theta,
                        attention_high_min,
                        accuracy,
                    },
                    distance,
                ));
            }
        }
    }
    Ok(best.expect("grid is non-empty").0)
}

/// Parses `t_ms,score,gradient,alert_expected` rows (expected alert as
/// `0`/`1` or `false`/`true`).
pub fn parse_labeled_log(text: &str, path: &Path) -> Result<Vec<LabeledWindow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "t_ms,score,gradient,alert_expected" => {}
        _ => {
            return Err(Error::ingest(
                path,
                1,
                "expected header `t_ms,score,gradient,alert_expected`",
            ));
        }
    }
    let mut out = Vec::new();
    for (i, raw) in lines {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::ingest(path, line_no, format!("`{s}` is not a number")))
        };
        if fields.len() != 4 {
            return Err(Error::ingest(path, line_no, "expected four fields"));
        }
        let alert_expected = match fields[3] {
            "1" | "true" => true,
            "0" | "false" => false,
            other => {
                return Err(Error::ingest(
                    path,
                    line_no,
                    format!("bad alert flag `{other}`"),
                ))
            }
        };
        out.push(LabeledWindow {
            score: num(fields[1])?,
            gradient: num(fields[2])?,
            alert_expected,
        });
    }
    Ok(out)
}
