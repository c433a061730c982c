//! End-to-end replay: PPG branch and saliency branch joined by window time.
//!
//! Map `i` of a sequence is stamped `ppg_start + round(i * 1000 / map_fps)`.
//! Each PPG window `[s, s + len)` is paired with the maps stamped inside it;
//! windows holding fewer than two maps have no scene measure and are left
//! out of the decision stream.

use std::path::Path;

use crate::config::RunConfig;
use crate::dsp::PpgSeries;
use crate::fusion::{stream_decide, AlertEvent, FusionDecision};
use crate::io::load_ppg_csv;
use crate::saliency::{scene_dynamics, SaliencyMap, SceneDynamics};
use crate::tcn::{predict_score, TcnParams};
use crate::{Error, Result};

use super::clips::list_stems;
use super::ppg::ppg_to_windows;

#[derive(Debug, Clone)]
pub struct ReplayOutput {
    pub decisions: Vec<FusionDecision>,
    pub events: Vec<AlertEvent>,
}

/// Loads `frame_*` maps of `dir` in stem order and stamps them.
pub fn load_map_sequence(dir: &Path, start_ms: i64, fps: f64) -> Result<Vec<SaliencyMap>> {
    let stems = list_stems(dir)?;
    if stems.is_empty() {
        return Err(Error::ingest(dir, 0, "no saliency maps"));
    }
    stems
        .iter()
        .enumerate()
        .map(|(i, stem)| {
            let ms = start_ms + (i as f64 * 1000.0 / fps).round() as i64;
            SaliencyMap::load(dir, stem, ms)
        })
        .collect()
}

pub fn replay(
    cfg: &RunConfig,
    tcn: &TcnParams,
    ppg: &PpgSeries,
    maps: &[SaliencyMap],
) -> Result<ReplayOutput> {
    let ppg_end = ppg.start_time_ms() as f64 + ppg.duration_ms();
    if let Some(last) = maps.last() {
        if last.frame_ms as f64 > ppg_end {
            return Err(Error::Alignment(format!(
                "maps run to {} ms but the PPG recording ends at {ppg_end} ms",
                last.frame_ms
            )));
        }
    }
    let windows = ppg_to_windows(ppg, &cfg.dsp)?;
    let span = (cfg.dsp.window_len_s * 1000.0).round() as i64;
    let mut pairs = Vec::with_capacity(windows.len());
    for w in &windows {
        let start = w.window_start_ms;
        let lo = maps.partition_point(|m| m.frame_ms < start);
        let hi = maps.partition_point(|m| m.frame_ms < start + span);
        if hi - lo < 2 {
            continue;
        }
        let dynamics = scene_dynamics(&maps[lo..hi])?;
        pairs.push((
            predict_score(tcn, w)?,
            SceneDynamics::new(dynamics.gradient, start)?,
        ));
    }
    if pairs.is_empty() {
        return Err(Error::Alignment(
            "no PPG window contains two or more saliency maps".into(),
        ));
    }
    let (decisions, events) = stream_decide(&pairs, &cfg.fusion)?;
    Ok(ReplayOutput { decisions, events })
}

/// File-level replay used by the command line.
pub fn replay_files(
    cfg: &RunConfig,
    tcn: &TcnParams,
    ppg_path: &Path,
    maps_dir: &Path,
) -> Result<ReplayOutput> {
    let ppg = load_ppg_csv(ppg_path)?;
    let maps = load_map_sequence(maps_dir, ppg.start_time_ms(), cfg.map_fps)?;
    replay(cfg, tcn, &ppg, &maps)
}
